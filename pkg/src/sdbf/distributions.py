"""Densities, CDFs and samplers for the handful of univariate families the
models need: Cauchy, half-Cauchy, Normal and Student-t."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import ParameterError

__all__ = [
    "Family",
    "DistParams",
    "cauchy",
    "half_cauchy",
    "normal",
    "student_t",
    "pdf",
    "logpdf",
    "cdf",
    "sample",
    "t_tail_probability",
    "t_two_sided_p",
]

_LOG_PI = math.log(math.pi)
_LOG_2PI = math.log(2.0 * math.pi)


class Family(str, enum.Enum):
    CAUCHY = "cauchy"
    HALF_CAUCHY = "half_cauchy"
    NORMAL = "normal"
    STUDENT_T = "student_t"


@dataclass(frozen=True)
class DistParams:
    """A fully specified univariate distribution.

    ``scale`` is the standard deviation for Normal and the usual scale for
    the other families. ``dof`` is only read for Student-t.
    """

    family: Family
    location: float = 0.0
    scale: float = 1.0
    dof: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (math.isfinite(self.location) and math.isfinite(self.scale)):
            raise ParameterError("location and scale must be finite")
        if self.scale <= 0:
            raise ParameterError(f"scale must be positive, got {self.scale}")
        if self.family is Family.STUDENT_T:
            if self.dof is None or not self.dof > 0:
                raise ParameterError(f"Student-t needs dof > 0, got {self.dof}")


def cauchy(location=0.0, scale=1.0) -> DistParams:
    return DistParams(Family.CAUCHY, location, scale)


def half_cauchy(scale=1.0) -> DistParams:
    return DistParams(Family.HALF_CAUCHY, 0.0, scale)


def normal(location=0.0, scale=1.0) -> DistParams:
    return DistParams(Family.NORMAL, location, scale)


def student_t(dof, location=0.0, scale=1.0) -> DistParams:
    return DistParams(Family.STUDENT_T, location, scale, dof)


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ParameterError("x must be finite")
    return x


def logpdf(params: DistParams, x):
    """Log density; ``-inf`` outside the support."""
    x = _check_x(x)
    u = (x - params.location) / params.scale
    log_scale = math.log(params.scale)
    fam = params.family
    if fam is Family.CAUCHY:
        out = -_LOG_PI - log_scale - np.log1p(u * u)
    elif fam is Family.HALF_CAUCHY:
        with np.errstate(divide="ignore"):
            out = np.where(
                x >= 0, math.log(2.0) - _LOG_PI - log_scale - np.log1p(u * u), -np.inf
            )
    elif fam is Family.NORMAL:
        out = -0.5 * _LOG_2PI - log_scale - 0.5 * u * u
    else:
        # scipy switches to an asymptotic normaliser at large dof, where a
        # difference of log-gamma values loses digits to cancellation
        out = np.asarray(stats.t.logpdf(u, params.dof)) - log_scale
    return out[()] if out.ndim == 0 else out


def pdf(params: DistParams, x):
    return np.exp(logpdf(params, x))


def cdf(params: DistParams, x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise ParameterError("x must not be NaN")
    u = (x - params.location) / params.scale
    fam = params.family
    if fam is Family.CAUCHY:
        out = 0.5 + np.arctan(u) / math.pi
    elif fam is Family.HALF_CAUCHY:
        out = np.where(x > 0, 2.0 * np.arctan(np.maximum(u, 0.0)) / math.pi, 0.0)
    elif fam is Family.NORMAL:
        out = special.ndtr(u)
    else:
        out = special.stdtr(params.dof, u)
    out = np.asarray(out, dtype=float)
    return out[()] if out.ndim == 0 else out


def sample(params: DistParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. values using the caller's generator."""
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    fam = params.family
    if fam is Family.CAUCHY:
        u = rng.random(n)
        return params.location + params.scale * np.tan(math.pi * (u - 0.5))
    if fam is Family.HALF_CAUCHY:
        u = rng.random(n)
        return params.scale * np.tan(0.5 * math.pi * u)
    if fam is Family.NORMAL:
        return params.location + params.scale * rng.standard_normal(n)
    return params.location + params.scale * rng.standard_t(params.dof, n)


def t_tail_probability(t: float, dof: float) -> float:
    """Upper-tail probability ``1 - F(t)`` of a standard Student-t."""
    if not dof > 0:
        raise ParameterError(f"dof must be positive, got {dof}")
    return float(special.stdtr(dof, -t))


def t_two_sided_p(t: float, dof: float) -> float:
    """Conventional two-sided p-value ``2 (1 - F(|t|))``."""
    return 2.0 * t_tail_probability(abs(t), dof)
