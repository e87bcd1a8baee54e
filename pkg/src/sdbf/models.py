"""Data standardization, the classical t statistic, and the two graphical
models (one-sample and equal-variance two-sample) on effect size."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import distributions as dist
from .errors import DegenerateDataError, InsufficientDataError, ParameterError

__all__ = [
    "Design",
    "PriorSpec",
    "ObservedSample",
    "ModelSpec",
    "standardize",
    "t_statistic",
    "log_joint_density",
    "parse_prior",
    "log_density_fn",
]

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class Design(str, enum.Enum):
    ONE_SAMPLE = "one-sample"
    TWO_SAMPLE = "two-sample"


@dataclass(frozen=True)
class PriorSpec:
    """Zero-centred prior on effect size.

    ``family`` is ``"cauchy"`` (``scale_or_variance`` is the scale r) or
    ``"normal"`` (``scale_or_variance`` is the variance, not the sd).
    """

    family: str
    scale_or_variance: float

    def __post_init__(self):
        fam = str(self.family).lower()
        if fam not in ("cauchy", "normal"):
            raise ParameterError(f"prior family must be cauchy or normal, got {self.family!r}")
        object.__setattr__(self, "family", fam)
        v = float(self.scale_or_variance)
        if not (math.isfinite(v) and v > 0):
            raise ParameterError(f"prior dispersion must be positive, got {self.scale_or_variance}")
        object.__setattr__(self, "scale_or_variance", v)

    @property
    def dist(self) -> dist.DistParams:
        if self.family == "cauchy":
            return dist.cauchy(0.0, self.scale_or_variance)
        return dist.normal(0.0, math.sqrt(self.scale_or_variance))

    def pdf(self, x):
        return dist.pdf(self.dist, x)

    def logpdf(self, x):
        return dist.logpdf(self.dist, x)

    def cdf(self, x):
        return dist.cdf(self.dist, x)

    def __str__(self):
        return f"{self.family}:{self.scale_or_variance:g}"


def parse_prior(text: str) -> PriorSpec:
    """Parse ``"cauchy:<r>"`` or ``"normal:<variance>"``."""
    fam, sep, value = text.partition(":")
    if not sep:
        raise ParameterError(f"prior must look like 'cauchy:1' or 'normal:0.3', got {text!r}")
    try:
        v = float(value)
    except ValueError:
        raise ParameterError(f"bad prior dispersion in {text!r}") from None
    return PriorSpec(fam.strip(), v)


def _sd(v):
    return float(np.std(v, ddof=1))


@dataclass(frozen=True, eq=False)
class ObservedSample:
    """Raw data and its standardized form. Build with :func:`standardize`."""

    design: Design
    y: np.ndarray
    z: np.ndarray
    x: np.ndarray | None = None
    zx: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.y) if self.x is None else len(self.x) + len(self.y)

    def sufficient_stats(self):
        """(count, sum, sum of squares) of each standardized vector."""
        if self.design is Design.ONE_SAMPLE:
            return ((len(self.z), float(self.z.sum()), float(self.z @ self.z)),)
        return (
            (len(self.zx), float(self.zx.sum()), float(self.zx @ self.zx)),
            (len(self.z), float(self.z.sum()), float(self.z @ self.z)),
        )


def _as_vector(v, name):
    a = np.asarray(v, dtype=float).ravel()
    if a.size < 2:
        raise InsufficientDataError(f"{name} needs at least 2 values, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise ParameterError(f"{name} contains non-finite values")
    return a


def standardize(y, x=None, design: Design | str | None = None) -> ObservedSample:
    """Standardize one- or two-sample data.

    One sample: ``z = y / sd(y)`` (scaled, not centred). Two samples: both
    vectors are centred and scaled by the mean and sd of ``x``.
    """
    if design is None:
        design = Design.ONE_SAMPLE if x is None else Design.TWO_SAMPLE
    design = Design(design)
    y = _as_vector(y, "y")
    if design is Design.ONE_SAMPLE:
        s = _sd(y)
        if not s > 0:
            raise DegenerateDataError("y has zero variance")
        z = y / s
        z.flags.writeable = False
        y.flags.writeable = False
        return ObservedSample(design, y, z)
    if x is None:
        raise ParameterError("two-sample design needs x")
    x = _as_vector(x, "x")
    m, s = float(x.mean()), _sd(x)
    if not s > 0:
        raise DegenerateDataError("x has zero variance")
    zx = (x - m) / s
    zy = (y - m) / s
    for a in (x, y, zx, zy):
        a.flags.writeable = False
    return ObservedSample(design, y, zy, x, zx)


def t_statistic(sample: ObservedSample) -> tuple[float, float]:
    """One-sample t statistic on the raw data and its degrees of freedom."""
    if sample.design is not Design.ONE_SAMPLE:
        raise ParameterError("t_statistic is defined for the one-sample design")
    y = sample.y
    n = len(y)
    s = _sd(y)
    if not s > 0:
        raise DegenerateDataError("y has zero variance")
    return float(y.mean() / (s / math.sqrt(n))), float(n - 1)


@dataclass(frozen=True)
class ModelSpec:
    """Priors for one of the two models.

    ``fixed_sigma`` switches to the verification model: sigma is held at
    that value and only delta is free. It is meant for tests against the
    conjugate normal closed form, not for analysis.
    ``use_likelihood=False`` drops the data term so the sampler targets
    the prior.
    """

    design: Design
    delta_prior: PriorSpec = field(default_factory=lambda: PriorSpec("cauchy", 1.0))
    sigma_prior: dist.DistParams = field(default_factory=lambda: dist.half_cauchy(1.0))
    mu_prior: dist.DistParams | None = None
    fixed_sigma: float | None = None
    use_likelihood: bool = True

    def __post_init__(self):
        object.__setattr__(self, "design", Design(self.design))
        if self.sigma_prior.family is not dist.Family.HALF_CAUCHY:
            raise ParameterError("sigma prior must be half-Cauchy")
        if self.design is Design.TWO_SAMPLE:
            if self.mu_prior is None:
                object.__setattr__(self, "mu_prior", dist.cauchy(0.0, 1.0))
            if self.fixed_sigma is not None:
                raise ParameterError("fixed_sigma is only available for the one-sample design")
        elif self.mu_prior is not None:
            raise ParameterError("mu prior only applies to the two-sample design")
        if self.fixed_sigma is not None and not self.fixed_sigma > 0:
            raise ParameterError("fixed_sigma must be positive")

    @property
    def param_names(self) -> tuple[str, ...]:
        if self.fixed_sigma is not None:
            return ("delta",)
        if self.design is Design.TWO_SAMPLE:
            return ("delta", "sigma", "mu")
        return ("delta", "sigma")


def _prior_logpdf_fn(params: dist.DistParams):
    """Unchecked vectorised log density for the prior families in use."""
    loc, scale = params.location, params.scale
    fam = params.family
    if fam is dist.Family.NORMAL:
        c = -0.5 * math.log(2.0 * math.pi) - math.log(scale)
        return lambda x: c - 0.5 * ((x - loc) / scale) ** 2
    c = -math.log(math.pi) - math.log(scale)
    if fam is dist.Family.HALF_CAUCHY:
        c += math.log(2.0)  # caller keeps x > 0
    elif fam is not dist.Family.CAUCHY:
        raise ParameterError(f"unsupported prior family {fam}")
    return lambda x: c - np.log1p(((x - loc) / scale) ** 2)


def log_density_fn(spec: ModelSpec, sample: ObservedSample):
    """Vectorised ``f(delta, sigma, mu=None)`` returning the log joint.

    No argument checking: the caller guarantees sigma > 0. Likelihood terms
    are evaluated from sufficient statistics, so the cost does not grow
    with the sample size.
    """
    if spec.design is not sample.design:
        raise ParameterError("model and sample designs differ")
    log_delta = _prior_logpdf_fn(spec.delta_prior.dist)
    log_sigma = None if spec.fixed_sigma is not None else _prior_logpdf_fn(spec.sigma_prior)
    log_mu = _prior_logpdf_fn(spec.mu_prior) if spec.design is Design.TWO_SAMPLE else None
    groups = sample.sufficient_stats() if spec.use_likelihood else ()

    def loglik(n, s1, s2, mean, sigma):
        # sum_i log N(z_i | mean, sigma)
        return -n * (_HALF_LOG_2PI + np.log(sigma)) - 0.5 * (s2 - 2.0 * mean * s1 + n * mean * mean) / (sigma * sigma)

    def f(delta, sigma, mu=None):
        out = log_delta(delta)
        if log_sigma is not None:
            out = out + log_sigma(sigma)
        if log_mu is not None:
            out = out + log_mu(mu)
        if not groups:
            return out
        if log_mu is None:
            return out + loglik(*groups[0], delta * sigma, sigma)
        half_alpha = 0.5 * delta * sigma
        return out + loglik(*groups[0], mu + half_alpha, sigma) + loglik(*groups[1], mu - half_alpha, sigma)

    return f


def log_joint_density(spec: ModelSpec, sample: ObservedSample, delta, sigma=None, mu=None) -> float:
    """log[prior(delta) prior(sigma) (prior(mu)) likelihood(z | params)].

    Returns ``-inf`` when sigma is not positive.
    """
    if spec.design is not sample.design:
        raise ParameterError("model and sample designs differ")
    if spec.fixed_sigma is not None:
        sigma = spec.fixed_sigma
    if sigma is None or not sigma > 0:
        return -math.inf
    if spec.design is Design.TWO_SAMPLE and mu is None:
        raise ParameterError("two-sample model needs mu")
    if not (math.isfinite(delta) and math.isfinite(sigma)):
        return -math.inf
    return float(log_density_fn(spec, sample)(delta, sigma, mu))
