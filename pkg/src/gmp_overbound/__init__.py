"""Tight Gauss-Markov overbound models for linear estimators whose error
correlation time constant is only known to lie in an interval."""

__version__ = "0.1.0"

from .models import (  # noqa: E402
    MODE_CONTINUOUS,
    MODE_DISCRETE,
    MODE_NONSTATIONARY,
    BoundModel,
    DiscreteGmpParams,
    FrequencyGrid,
    GmpSpec,
    SamplingSpec,
    TauInterval,
    acm2,
    autocov_nonstationary,
    continuous_bound,
    discrete_bound,
    gmp_discrete_params,
    nonstationary_k0,
    psd_continuous,
    psd_discrete,
)

__all__ = [
    "__version__",
    "MODE_CONTINUOUS",
    "MODE_DISCRETE",
    "MODE_NONSTATIONARY",
    "BoundModel",
    "DiscreteGmpParams",
    "FrequencyGrid",
    "GmpSpec",
    "SamplingSpec",
    "TauInterval",
    "acm2",
    "autocov_nonstationary",
    "continuous_bound",
    "discrete_bound",
    "gmp_discrete_params",
    "nonstationary_k0",
    "psd_continuous",
    "psd_discrete",
]
