"""Bayes factors for effect-size hypotheses.

Three routes are provided:

* point null by the posterior/prior ordinate ratio at ``delta0`` (needs
  posterior draws and a density estimate);
* directional and interval nulls by comparing posterior and prior mass that
  satisfies each constraint, both measured against the unconstrained model
  and combined by transitivity;
* the closed-form JZS Bayes factor from a t statistic, by quadrature.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import integrate

from .density import bandwidth_sensitivity, density_at, fit_density
from .errors import ConfigurationError, EstimationError, NumericalError, ParameterError
from .models import PriorSpec
from .sampler import RHAT_THRESHOLD, PosteriorDraws

__all__ = [
    "Method",
    "HypothesisKind",
    "HypothesisSpec",
    "BayesFactorResult",
    "savage_dickey_bf",
    "encompassing_directional_bf",
    "encompassing_interval_bf",
    "compute_bf",
    "jzs_bf",
    "compose_bf",
    "mc_standard_error",
    "N_BATCHES",
]

N_BATCHES = 20
JZS_RTOL = 1e-8


class Method(str, enum.Enum):
    SAVAGE_DICKEY = "savage-dickey"
    ENCOMPASSING = "encompassing"
    JZS = "jzs"


class HypothesisKind(str, enum.Enum):
    POINT = "point"
    DIRECTIONAL = "directional"
    INTERVAL = "interval"


@dataclass(frozen=True)
class HypothesisSpec:
    """What H0 and H1 are.

    * ``point``: H0 delta = delta0 against H1 delta != delta0.
    * ``directional``: H0 delta <= 0 against H1 delta > 0 (``direction =
      "positive"``), or the mirror image for ``"negative"``.
    * ``interval``: H0 |delta| < epsilon against H1 |delta| > epsilon.
    """

    kind: HypothesisKind = HypothesisKind.POINT
    delta0: float = 0.0
    epsilon: float | None = None
    direction: str = "positive"

    def __post_init__(self):
        object.__setattr__(self, "kind", HypothesisKind(self.kind))
        if self.kind is HypothesisKind.INTERVAL:
            if self.epsilon is None or not self.epsilon > 0:
                raise ParameterError(f"interval null needs epsilon > 0, got {self.epsilon}")
        if self.direction not in ("positive", "negative"):
            raise ParameterError("direction must be 'positive' or 'negative'")
        if not math.isfinite(self.delta0):
            raise ParameterError("delta0 must be finite")


def _reciprocal(b):
    if b == 0:
        return math.inf
    if math.isinf(b):
        return 0.0
    return 1.0 / b


@dataclass
class BayesFactorResult:
    bf01: float
    bf10: float
    method: Method
    components: dict[str, Any] = field(default_factory=dict)
    mc_se: float | None = None
    converged: bool | None = None
    warnings: list[str] = field(default_factory=list)
    hypothesis: HypothesisSpec | None = None

    @classmethod
    def from_bf01(cls, bf01, method, **kw):
        return cls(float(bf01), _reciprocal(float(bf01)), Method(method), **kw)

    @classmethod
    def from_bf10(cls, bf10, method, **kw):
        return cls(_reciprocal(float(bf10)), float(bf10), Method(method), **kw)

    @property
    def favored(self) -> str:
        return "H0" if self.bf01 > 1 else "H1"

    def to_dict(self) -> dict[str, Any]:
        out = {
            "method": self.method.value,
            "bf01": self.bf01,
            "bf10": self.bf10,
            "components": self.components,
            "mc_se": self.mc_se,
            "converged": self.converged,
            "warnings": list(self.warnings),
        }
        if self.hypothesis is not None:
            h = self.hypothesis
            out["hypothesis"] = {
                "kind": h.kind.value,
                "delta0": h.delta0,
                "epsilon": h.epsilon,
                "direction": h.direction,
            }
        return out


def _check_prior(draws: PosteriorDraws, prior: PriorSpec):
    if draws.spec.delta_prior != prior:
        raise ConfigurationError(
            f"draws were sampled under prior {draws.spec.delta_prior}, not {prior}"
        )


def _convergence_warnings(draws: PosteriorDraws):
    if draws.converged:
        return []
    bad = {k: round(v, 4) for k, v in draws.rhat.items() if v > RHAT_THRESHOLD}
    return [f"chains not converged (R-hat {bad}); rerun with more draws"]


def _batches(draws, n_batches):
    """Split draws along the iteration axis; batch b pools block b of every chain."""
    if isinstance(draws, PosteriorDraws):
        a = draws.chains["delta"]
    else:
        a = np.asarray(draws, dtype=float)
        if a.ndim == 1:
            a = a[None, :]
    n = a.shape[1]
    if n < n_batches:
        raise EstimationError(f"need at least {n_batches} draws per chain for batch means")
    edges = np.linspace(0, n, n_batches + 1).astype(int)
    return [a[:, lo:hi].ravel() for lo, hi in zip(edges[:-1], edges[1:])]


def mc_standard_error(draws, estimator: Callable[[np.ndarray], float], n_batches: int = N_BATCHES) -> float:
    """Batch-means standard error of ``estimator`` applied to delta draws.

    The estimate is computed on each of ``n_batches`` contiguous blocks and
    the spread of those block estimates is scaled back to the full run.
    Returns ``inf`` when any block estimate is infinite.
    """
    try:
        est = np.array([estimator(b) for b in _batches(draws, n_batches)], dtype=float)
    except EstimationError as exc:
        raise EstimationError(f"too few draws for batch means: {exc}") from exc
    if not np.all(np.isfinite(est)):
        return math.inf
    if np.ptp(est) == 0:
        return 0.0
    return float(est.std(ddof=1) / math.sqrt(n_batches))


def savage_dickey_bf(draws: PosteriorDraws, prior: PriorSpec, delta0: float = 0.0) -> BayesFactorResult:
    """Point-null Bayes factor from the posterior and prior ordinates at ``delta0``."""
    _check_prior(draws, prior)
    est = fit_density(draws.delta)
    post = density_at(est, delta0)
    prior_ord = float(prior.pdf(delta0))
    bf01 = post / prior_ord
    sens = bandwidth_sensitivity(est, delta0)

    h = est.bandwidth

    def batch_bf01(x):
        # full-run bandwidth, so block spread reflects the full-run estimator
        return density_at(fit_density(x, bandwidth=h), delta0) / prior_ord

    comps = {
        "posterior_ordinate": post,
        "prior_ordinate": prior_ord,
        "bandwidth": h,
        "posterior_ordinate_by_bandwidth": sens,
        "bf01_by_bandwidth": {k: v / prior_ord for k, v in sens.items()},
        "n_draws": int(draws.delta.size),
        "ess_delta": draws.ess.get("delta"),
        "rhat": dict(draws.rhat),
    }
    return BayesFactorResult.from_bf01(
        bf01,
        Method.SAVAGE_DICKEY,
        components=comps,
        mc_se=mc_standard_error(draws, batch_bf01),
        converged=draws.converged,
        warnings=_convergence_warnings(draws),
        hypothesis=HypothesisSpec(HypothesisKind.POINT, delta0=delta0),
    )


def _encompassing(draws, in_h0: Callable[[np.ndarray], np.ndarray], prior_h0: float, hyp, extra):
    """B10 from evidential proportions; H1 is the complement of H0."""
    delta = draws.delta
    n = delta.size
    k0 = int(np.count_nonzero(in_h0(delta)))
    k1 = n - k0
    post0, post1 = k0 / n, k1 / n
    prior1 = 1.0 - prior_h0
    if not (0 < prior_h0 < 1):
        raise ParameterError("prior mass of H0 must lie strictly between 0 and 1")
    b0e = post0 / prior_h0
    b1e = post1 / prior1
    msgs = _convergence_warnings(draws)
    if k0 == 0 or k1 == 0:
        bf10 = math.inf if k0 == 0 else 0.0
        side = "H0" if k0 == 0 else "H1"
        msgs.append(
            f"no posterior draws fall in {side} ({k0} in H0, {k1} in H1 of {n}); "
            "the Bayes factor is a finite-sample bound, increase the number of draws"
        )
    else:
        bf10 = compose_bf(b1e, b0e)

    def batch_bf10(x):
        j0 = np.count_nonzero(in_h0(x))
        j1 = x.size - j0
        if j0 == 0:
            return math.inf
        return (j1 / x.size / prior1) / (j0 / x.size / prior_h0)

    comps = {
        "posterior_proportion_h0": post0,
        "posterior_proportion_h1": post1,
        "prior_proportion_h0": prior_h0,
        "prior_proportion_h1": prior1,
        "b0e": b0e,
        "b1e": b1e,
        "count_h0": k0,
        "count_h1": k1,
        "n_draws": n,
        "rhat": dict(draws.rhat),
        **extra,
    }
    return BayesFactorResult.from_bf10(
        bf10,
        Method.ENCOMPASSING,
        components=comps,
        mc_se=mc_standard_error(draws, batch_bf10),
        converged=draws.converged,
        warnings=msgs,
        hypothesis=hyp,
    )


def encompassing_directional_bf(draws: PosteriorDraws, prior: PriorSpec, direction: str = "positive") -> BayesFactorResult:
    """B10 for delta > 0 (H1) against delta <= 0 (H0).

    With ``direction="negative"`` the roles flip: H1 is delta < 0.
    """
    _check_prior(draws, prior)
    hyp = HypothesisSpec(HypothesisKind.DIRECTIONAL, direction=direction)
    p_le0 = float(prior.cdf(0.0))
    if direction == "positive":
        return _encompassing(draws, lambda d: d <= 0, p_le0, hyp, {})
    return _encompassing(draws, lambda d: d >= 0, 1.0 - p_le0, hyp, {})


def encompassing_interval_bf(draws: PosteriorDraws, prior: PriorSpec, epsilon: float) -> BayesFactorResult:
    """B10 for |delta| > epsilon (H1) against |delta| < epsilon (H0)."""
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    _check_prior(draws, prior)
    hyp = HypothesisSpec(HypothesisKind.INTERVAL, epsilon=epsilon)
    mass = float(prior.cdf(epsilon) - prior.cdf(-epsilon))
    return _encompassing(draws, lambda d: np.abs(d) < epsilon, mass, hyp, {"epsilon": epsilon})


def compute_bf(draws: PosteriorDraws, prior: PriorSpec, hypothesis: HypothesisSpec) -> BayesFactorResult:
    """Dispatch on ``hypothesis.kind``."""
    if hypothesis.kind is HypothesisKind.POINT:
        return savage_dickey_bf(draws, prior, hypothesis.delta0)
    if hypothesis.kind is HypothesisKind.DIRECTIONAL:
        return encompassing_directional_bf(draws, prior, hypothesis.direction)
    return encompassing_interval_bf(draws, prior, hypothesis.epsilon)


def compose_bf(b_ae: float, b_be: float) -> float:
    """Transitivity: B_ab = B_ae / B_be."""
    for b in (b_ae, b_be):
        if not (math.isfinite(b) and b > 0):
            raise ParameterError(f"Bayes factors must be positive and finite, got {b}")
    return b_ae / b_be


def _jzs_log_integrand(t, n, r):
    """log of the JZS denominator integrand, after g = u / (1 - u)."""
    nu = n - 1.0
    a = 0.5 * (nu + 1.0)
    r2 = r * r

    def f(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = u / (1.0 - u)
            s = 1.0 + n * g * r2
            out = (
                -0.5 * np.log(s)
                - a * np.log1p(t * t / (s * nu))
                - 0.5 * math.log(2.0 * math.pi)
                - 1.5 * np.log(g)
                - 0.5 / g
                - 2.0 * np.log1p(-u)  # dg/du
            )
        return np.where(np.isnan(out), -np.inf, out)

    return f


def jzs_bf(t: float, n: int, r: float = 1.0) -> BayesFactorResult:
    """Closed-form JZS Bayes factor for a one-sample t statistic.

    The denominator integral over g in (0, inf) is mapped to u in (0, 1)
    and integrated by adaptive Gauss-Kronrod (QUADPACK) in scaled form, so
    very large or very small Bayes factors do not overflow.
    """
    if not math.isfinite(t):
        raise ParameterError("t must be finite")
    if n < 2:
        raise ParameterError(f"N must be at least 2, got {n}")
    if not (math.isfinite(r) and r > 0):
        raise ParameterError(f"r must be positive, got {r}")
    n = float(n)
    nu = n - 1.0
    log_num = -0.5 * (nu + 1.0) * math.log1p(t * t / nu)
    logf = _jzs_log_integrand(t, n, r)

    # Gauss-Kronrod on logit-spaced pieces of (0, 1): the mass can sit in a
    # thin layer next to either endpoint, which one global call may miss.
    # Pieces whose integrand stays below exp(-60) of the peak are dropped.
    knots = np.arange(-36.0, 36.0 + 1e-9, 1.0)
    fine = 1.0 / (1.0 + np.exp(-np.linspace(-36.0, 36.0, 3601)))
    lg_fine = logf(fine)
    scale = float(lg_fine.max())
    if not math.isfinite(scale):
        raise NumericalError("JZS integrand vanishes everywhere", diagnostics={"t": t, "n": n, "r": r})
    seg_max = lg_fine[:-1].reshape(len(knots) - 1, 50).max(axis=1)
    seg_max = np.maximum(seg_max, lg_fine[50::50])
    edges = 1.0 / (1.0 + np.exp(-knots))
    edges[0], edges[-1] = 0.0, 1.0

    val, err, neval, bad = 0.0, 0.0, 0, []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for k in range(len(edges) - 1):
            if seg_max[k] < scale - 60.0:
                continue
            v, e, info = integrate.quad(
                lambda u: math.exp(float(logf(u)) - scale),
                edges[k], edges[k + 1],
                epsabs=0.0, epsrel=JZS_RTOL * 1e-2, limit=200, full_output=True,
            )[:3]
            val += v
            err += e
            neval += info["neval"]
            if e > JZS_RTOL * max(v, 1e-300) and e > 1e-3 * JZS_RTOL:
                bad.append((float(edges[k]), float(edges[k + 1]), e))
    if not (val > 0 and math.isfinite(val)) or err > JZS_RTOL * val:
        raise NumericalError(
            "JZS quadrature did not converge",
            diagnostics={"value": val, "abserr": err, "neval": neval, "bad_segments": bad,
                         "t": t, "n": n, "r": r},
        )
    log_den = math.log(val) + scale
    log_bf01 = log_num - log_den
    comps = {
        "t": float(t),
        "n": int(n),
        "r": float(r),
        "numerator": math.exp(log_num),
        "denominator": math.exp(log_den),
        "log_bf01": log_bf01,
        "quadrature_abserr": err * math.exp(scale),
    }
    return BayesFactorResult.from_bf01(
        math.exp(log_bf01), Method.JZS, components=comps,
        hypothesis=HypothesisSpec(HypothesisKind.POINT),
    )
