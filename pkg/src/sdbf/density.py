"""Gaussian kernel density estimate of a posterior from its draws, used for
the posterior ordinate in the density-ratio Bayes factor."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError

__all__ = [
    "DensityEstimate",
    "silverman_bandwidth",
    "fit_density",
    "density_at",
    "density_curve",
    "bandwidth_sensitivity",
    "MIN_DRAWS",
]

MIN_DRAWS = 100
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_CHUNK = 2_000_000


def silverman_bandwidth(draws) -> float:
    """``0.9 * min(sd, IQR / 1.34) * n ** (-1/5)``.

    Falls back to the sd when the IQR is zero.
    """
    x = np.asarray(draws, dtype=float)
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
    return 0.9 * spread * len(x) ** -0.2


def _check_bandwidth(h):
    if not h > 0:
        raise EstimationError("bandwidth must be positive")
    if float(h) < 1.0 / np.finfo(float).max:
        # kernel heights 1/h overflow; happens when the draws' spread is subnormal
        raise EstimationError(f"bandwidth {h!r} is too small to evaluate")


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    draws: np.ndarray
    bandwidth: float
    method: str = "gaussian_kde"

    def __call__(self, points):
        return density_at(self, points)

    def with_bandwidth(self, bandwidth: float) -> "DensityEstimate":
        _check_bandwidth(bandwidth)
        return DensityEstimate(self.draws, float(bandwidth), self.method)


def fit_density(draws, bandwidth: float | None = None) -> DensityEstimate:
    x = np.asarray(draws, dtype=float).ravel()
    if x.size < MIN_DRAWS:
        raise EstimationError(f"need at least {MIN_DRAWS} draws, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise EstimationError("draws must be finite")
    if np.ptp(x) == 0:
        raise EstimationError("draws have zero variance")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    _check_bandwidth(h)
    x = np.sort(x)
    x.flags.writeable = False
    return DensityEstimate(x, h)


def density_at(est: DensityEstimate, point):
    """Exact kernel sum at one point or an array of points."""
    pts = np.asarray(point, dtype=float)
    flat = pts.ravel()
    x, h = est.draws, est.bandwidth
    out = np.empty(flat.size)
    step = max(1, _CHUNK // x.size)
    for i in range(0, flat.size, step):
        with np.errstate(over="ignore"):  # far points: u -> inf, kernel -> 0
            u = (flat[i:i + step, None] - x[None, :]) / h
            out[i:i + step] = np.exp(-0.5 * u * u).sum(axis=1)
    out *= _INV_SQRT_2PI / (x.size * h)
    if pts.ndim == 0:
        return float(out[0])
    return out.reshape(pts.shape)


def density_curve(est: DensityEstimate, grid) -> np.ndarray:
    """``(len(grid), 2)`` array of (x, density)."""
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        return np.empty((0, 2))
    if not np.all(np.isfinite(g)):
        raise EstimationError("grid must be finite")
    return np.column_stack([g, density_at(est, g)])


def bandwidth_sensitivity(est: DensityEstimate, point: float, factors=(0.5, 1.0, 2.0)) -> dict[str, float]:
    """Ordinate at ``point`` under rescaled bandwidths, keyed like ``"h*0.5"``."""
    return {f"h*{f:g}": density_at(est.with_bandwidth(est.bandwidth * f), point) for f in factors}
