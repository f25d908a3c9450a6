"""Bayesian sample size determination with commensurate priors built from
several historical sources."""

from .collective import (
    CollectivePrior,
    HistoricalSummary,
    WeightRule,
    build_collective_prior,
    compute_weights,
    hellinger_squared,
    prior_credible_interval,
    special_weighting,
)
from .commensurate import GammaMixtureHyper, marginal_t_mixture, normal_approximation
from .posterior import KnownVariance, NewData, UnknownVariance
from .ssd import ACC, ALC, APVC, Allocation, SSDResult, optimal_benchmark, solve

__version__ = "0.1.0"

__all__ = [
    "ACC",
    "ALC",
    "APVC",
    "Allocation",
    "CollectivePrior",
    "GammaMixtureHyper",
    "HistoricalSummary",
    "KnownVariance",
    "NewData",
    "SSDResult",
    "UnknownVariance",
    "WeightRule",
    "build_collective_prior",
    "compute_weights",
    "hellinger_squared",
    "marginal_t_mixture",
    "normal_approximation",
    "optimal_benchmark",
    "prior_credible_interval",
    "solve",
    "special_weighting",
]
