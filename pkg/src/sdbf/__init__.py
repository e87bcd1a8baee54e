"""Bayes factors for one- and two-sample effect-size tests.

Point nulls via the posterior/prior density ratio, directional and
interval nulls via encompassing priors, and the closed-form JZS Bayes
factor for comparison.
"""

__version__ = "0.1.0"

from .bayesfactor import (  # noqa: E402
    BayesFactorResult,
    HypothesisSpec,
    compose_bf,
    compute_bf,
    encompassing_directional_bf,
    encompassing_interval_bf,
    jzs_bf,
    savage_dickey_bf,
)
from .models import Design, ModelSpec, PriorSpec, parse_prior, standardize, t_statistic  # noqa: E402
from .sampler import PosteriorDraws, SamplerSettings, sample_posterior  # noqa: E402

__all__ = [
    "BayesFactorResult",
    "Design",
    "HypothesisSpec",
    "ModelSpec",
    "PosteriorDraws",
    "PriorSpec",
    "SamplerSettings",
    "compose_bf",
    "compute_bf",
    "encompassing_directional_bf",
    "encompassing_interval_bf",
    "jzs_bf",
    "parse_prior",
    "sample_posterior",
    "savage_dickey_bf",
    "standardize",
    "t_statistic",
]
