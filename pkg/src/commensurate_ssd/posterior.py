"""Posterior and predictive distributions of the new-experiment effect.

All inference runs through the difference in sample means, which is
sufficient for the effect under a common variance.  With a known variance
the update is conjugate normal.  With an unknown variance the prior is
Inv-Gamma(c/2, c S/2) where S is the collective prior variance; the
conditional update is still normal, and the marginal posterior is the
normal prior kernel times a t kernel, normalised numerically here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .collective import CollectivePrior
from .distributions import (
    DEFAULT_QUADRATURE,
    InvGammaParams,
    NormalParams,
    QuadratureSpec,
    integrate,
)
from .errors import DomainError, UndefinedMomentError

__all__ = [
    "KnownVariance",
    "UnknownVariance",
    "VarianceModel",
    "NewData",
    "PosteriorNormal",
    "sampling_factor",
    "posterior_known",
    "posterior_conditional_unknown",
    "marginal_predictive",
    "unknown_variance_kernel",
    "marginal_posterior_density_unknown",
]


@dataclass(frozen=True)
class KnownVariance:
    sigma2: float

    def __post_init__(self):
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise DomainError(f"known variance sigma2 must be positive, got {self.sigma2!r}")


@dataclass(frozen=True)
class UnknownVariance:
    """Degrees of freedom ``c`` of the scaled chi-square prior on the variance."""

    c: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise DomainError(f"degrees of freedom c must be positive, got {self.c!r}")

    def prior(self, S: float) -> InvGammaParams:
        return InvGammaParams(self.c / 2.0, self.c * S / 2.0)

    def expected_sigma2(self, S: float) -> float:
        if self.c <= 2.0:
            raise UndefinedMomentError(
                f"E[sigma0^2] under Inv-Gamma(c/2, cS/2) needs c > 2 (shape > 1); got c={self.c}"
            )
        return self.c * S / (self.c - 2.0)


VarianceModel = KnownVariance | UnknownVariance


@dataclass(frozen=True)
class NewData:
    nA: int
    nB: int
    xbar_delta: float = 0.0

    def __post_init__(self):
        for name in ("nA", "nB"):
            n = getattr(self, name)
            if int(n) != n or n < 1:
                raise DomainError(f"{name} must be a positive integer, got {n!r}")


@dataclass(frozen=True)
class PosteriorNormal:
    mean: float
    variance: float
    prior_weight: float
    data_weight: float

    @property
    def normal(self) -> NormalParams:
        return NormalParams(self.mean, self.variance)


def sampling_factor(nA: int, nB: int) -> float:
    """``1/nA + 1/nB``; infinite when either arm is empty (no information)."""
    if nA <= 0 or nB <= 0:
        return math.inf
    return 1.0 / nA + 1.0 / nB


def posterior_known(prior: CollectivePrior, sigma2: float, data: NewData) -> PosteriorNormal:
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2!r}")
    S = prior.variance
    noise = sampling_factor(data.nA, data.nB) * sigma2
    total = S + noise
    prior_weight = noise / total
    data_weight = S / total
    mean = prior_weight * prior.mean + data_weight * data.xbar_delta
    variance = 1.0 / (1.0 / S + 1.0 / noise)
    return PosteriorNormal(mean, variance, prior_weight, data_weight)


def posterior_conditional_unknown(
    prior: CollectivePrior, sigma2_draw: float, data: NewData
) -> PosteriorNormal:
    return posterior_known(prior, sigma2_draw, data)


def marginal_predictive(prior: CollectivePrior, sigma2: float, nA: int, nB: int) -> NormalParams:
    """Prior predictive of the observed mean difference given the variance."""
    return NormalParams(prior.mean, sampling_factor(nA, nB) * sigma2 + prior.variance)


def unknown_variance_kernel(mu, prior: CollectivePrior, c: float, data: NewData):
    """Unnormalised marginal posterior of the effect under the Inv-Gamma variance prior."""
    S = prior.variance
    k = sampling_factor(data.nA, data.nB)
    mu = np.asarray(mu, dtype=float)
    normal_part = (mu - prior.mean) ** 2 / (2.0 * S)
    t_part = (c + 1.0) / 2.0 * np.log1p((mu - data.xbar_delta) ** 2 / (c * k * S))
    return np.exp(-normal_part - t_part)


@lru_cache(maxsize=1024)
def _normaliser(mean: float, S: float, c: float, nA: int, nB: int, xbar: float, spec: QuadratureSpec) -> float:
    prior = CollectivePrior.from_moments(mean, S)
    data = NewData(nA, nB, xbar)
    lo, hi = sorted((mean, xbar))

    def f(x):
        return float(unknown_variance_kernel(x, prior, c, data))

    return (
        integrate(f, -math.inf, lo, spec)[0]
        + integrate(f, lo, hi, spec)[0]
        + integrate(f, hi, math.inf, spec)[0]
    )


def marginal_posterior_density_unknown(
    mu: float,
    prior: CollectivePrior,
    c: float,
    data: NewData,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Normalised marginal posterior density of the effect at ``mu``.

    The normalising constant is computed by quadrature once per input set
    and cached (the cache is safe for concurrent readers).
    """
    if not c > 0:
        raise DomainError(f"degrees of freedom c must be positive, got {c!r}")
    z = _normaliser(prior.mean, prior.variance, float(c), data.nA, data.nB, data.xbar_delta, spec)
    return unknown_variance_kernel(mu, prior, c, data) / z
