"""Sample sizes for the ACC, ALC and APVC criteria.

Every closed form bounds the effective size ``nA nB / (nA + nB)``.  With a
known variance ACC and ALC share one bound.  With an unknown variance the
ACC and APVC bounds replace the variance by its Inv-Gamma prior mean, and
the ALC needs an integer search over the quadrature-averaged posterior
interval length.

Integer designs follow one split rule everywhere: a total ``n`` is divided
as ``nA = ceil(n rA / (rA + rB))``, ``nB = n - nA``.  Both arms are then
nondecreasing in ``n``, which keeps every criterion monotone in the total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import special

from .collective import CollectivePrior
from .distributions import (
    DEFAULT_QUADRATURE,
    GammaParams,
    QuadratureSpec,
    integrate,
    standard_normal_upper,
)
from .errors import DomainError
from .posterior import KnownVariance, UnknownVariance, VarianceModel, sampling_factor

__all__ = [
    "ACC",
    "ALC",
    "APVC",
    "Criterion",
    "Allocation",
    "SSDResult",
    "effective_size",
    "posterior_variance",
    "average_coverage",
    "average_length",
    "average_posterior_variance",
    "criterion_metric",
    "criterion_met",
    "effective_bound_known",
    "effective_bound_unknown",
    "smallest_satisfying",
    "alc_unknown_search",
    "solve",
    "optimal_benchmark",
]


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")


def _unit(name, value):
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie strictly in (0, 1), got {value!r}")


@dataclass(frozen=True)
class ACC:
    """Average coverage of a fixed-length ``l0`` interval must reach ``1 - alpha``."""

    l0: float
    alpha: float = 0.05
    kind = "ACC"

    def __post_init__(self):
        _positive("l0", self.l0)
        _unit("alpha", self.alpha)


@dataclass(frozen=True)
class ALC:
    """Average length of the ``1 - alpha0`` interval must not exceed ``l``."""

    l: float
    alpha0: float = 0.05
    kind = "ALC"

    def __post_init__(self):
        _positive("l", self.l)
        _unit("alpha0", self.alpha0)


@dataclass(frozen=True)
class APVC:
    """Average posterior variance must not exceed ``eps0``."""

    eps0: float
    kind = "APVC"

    def __post_init__(self):
        _positive("eps0", self.eps0)


Criterion = ACC | ALC | APVC


@dataclass(frozen=True)
class Allocation:
    ratio_A: int = 1
    ratio_B: int = 1

    def __post_init__(self):
        for name in ("ratio_A", "ratio_B"):
            r = getattr(self, name)
            if int(r) != r or r < 1:
                raise DomainError(f"{name} must be a positive integer, got {r!r}")

    def split(self, n: int) -> tuple[int, int]:
        if n < 0:
            raise DomainError(f"total sample size must be >= 0, got {n}")
        r = self.ratio_A + self.ratio_B
        nA = -(-n * self.ratio_A // r)
        return nA, n - nA

    def real_total(self, bound: float) -> float:
        """Continuous total whose exact-ratio split has effective size ``bound``."""
        r = self.ratio_A + self.ratio_B
        return bound * r * r / (self.ratio_A * self.ratio_B)


@dataclass(frozen=True)
class SSDResult:
    criterion: Criterion
    feasible: bool
    effective_bound: float | None
    real_total: float | None
    nA: int
    nB: int
    achieved: float
    method: str

    @property
    def total(self) -> int:
        return self.nA + self.nB


def effective_size(nA: int, nB: int) -> float:
    if nA <= 0 or nB <= 0:
        return 0.0
    return nA * nB / (nA + nB)


def posterior_variance(S: float, k: float, sigma2: float) -> float:
    """Posterior variance of the effect for sampling factor ``k = 1/nA + 1/nB``."""
    if math.isinf(k):
        return S
    return 1.0 / (1.0 / S + 1.0 / (k * sigma2))


def _z(tail_total: float) -> float:
    return standard_normal_upper(tail_total / 2.0)


def _precision_average(
    fn: Callable[[float], float], S: float, c: float, spec: QuadratureSpec
) -> float:
    """E[fn(tau)] with precision tau = 1/sigma0^2 ~ Gamma(c/2, rate cS/2)."""
    g = GammaParams(c / 2.0, c * S / 2.0)
    mean = g.mean()
    lo_val, _ = integrate(lambda t: fn(t) * float(g.pdf(t)), 0.0, mean, spec)
    hi_val, _ = integrate(lambda t: fn(t) * float(g.pdf(t)), mean, math.inf, spec)
    return lo_val + hi_val


def _averaged(fn_of_var, prior: CollectivePrior, vm: VarianceModel, nA, nB, spec):
    S = prior.variance
    k = sampling_factor(nA, nB)
    if isinstance(vm, KnownVariance):
        return fn_of_var(posterior_variance(S, k, vm.sigma2))
    if math.isinf(k):
        return fn_of_var(S)

    def in_precision(tau):
        return fn_of_var(1.0 / (1.0 / S + tau / k))

    return _precision_average(in_precision, S, vm.c, spec)


def average_coverage(prior, vm, nA, nB, l0, spec=DEFAULT_QUADRATURE) -> float:
    """Preposterior mean of P(|effect - posterior mean| <= l0/2)."""
    return _averaged(
        lambda v: float(special.erf(l0 / (2.0 * math.sqrt(2.0 * v)))), prior, vm, nA, nB, spec
    )


def average_length(prior, vm, nA, nB, alpha0, spec=DEFAULT_QUADRATURE) -> float:
    z = _z(alpha0)
    return _averaged(lambda v: 2.0 * z * math.sqrt(v), prior, vm, nA, nB, spec)


def average_posterior_variance(prior, vm, nA, nB, spec=DEFAULT_QUADRATURE) -> float:
    return _averaged(lambda v: v, prior, vm, nA, nB, spec)


def criterion_metric(prior, crit: Criterion, vm, nA, nB, spec=DEFAULT_QUADRATURE) -> float:
    if isinstance(crit, ACC):
        return average_coverage(prior, vm, nA, nB, crit.l0, spec)
    if isinstance(crit, ALC):
        return average_length(prior, vm, nA, nB, crit.alpha0, spec)
    if isinstance(crit, APVC):
        return average_posterior_variance(prior, vm, nA, nB, spec)
    raise DomainError(f"unknown criterion {crit!r}")


def criterion_met(crit: Criterion, value: float, slack: float = 0.0) -> bool:
    """Whether a metric value satisfies ``crit``, allowing ``slack`` in its favour."""
    if isinstance(crit, ACC):
        return value + slack >= 1.0 - crit.alpha
    if isinstance(crit, ALC):
        return value - slack <= crit.l
    return value - slack <= crit.eps0


def _precision_target(crit: Criterion) -> float:
    """Posterior precision the criterion demands when the variance is fixed."""
    if isinstance(crit, ACC):
        return 4.0 * _z(crit.alpha) ** 2 / crit.l0**2
    if isinstance(crit, ALC):
        return 4.0 * _z(crit.alpha0) ** 2 / crit.l**2
    if isinstance(crit, APVC):
        return 1.0 / crit.eps0
    raise DomainError(f"unknown criterion {crit!r}")


def effective_bound_known(prior: CollectivePrior, crit: Criterion, sigma2: float) -> float:
    _positive("sigma2", sigma2)
    return (_precision_target(crit) - 1.0 / prior.variance) * sigma2


def effective_bound_unknown(prior: CollectivePrior, crit: Criterion, c: float) -> float:
    if isinstance(crit, ALC):
        raise DomainError("the ALC with unknown variance has no closed form; use alc_unknown_search")
    e_sigma2 = UnknownVariance(c).expected_sigma2(prior.variance)
    return (_precision_target(crit) - 1.0 / prior.variance) * e_sigma2


def smallest_satisfying(pred: Callable[[int], bool], start: int = 1, limit: int = 10**12) -> int:
    """Smallest integer ``n >= start`` with ``pred(n)``, for a monotone ``pred``.

    Doubles an upper bracket, then bisects.
    """
    if pred(start):
        return start
    lo, hi = start, max(2 * start, start + 1)
    while not pred(hi):
        lo, hi = hi, 2 * hi
        if hi > limit:
            raise DomainError(f"no sample size up to {limit} satisfies the criterion")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _closed_form(prior, crit, vm, alloc, bound, spec) -> SSDResult:
    if bound <= 0.0:
        achieved = criterion_metric(prior, crit, vm, 0, 0, spec)
        return SSDResult(crit, True, bound, 0.0, 0, 0, achieved, "closed_form")
    target = bound * (1.0 - 1e-12)
    n = smallest_satisfying(lambda t: effective_size(*alloc.split(t)) >= target, start=2)
    nA, nB = alloc.split(n)
    achieved = criterion_metric(prior, crit, vm, nA, nB, spec)
    return SSDResult(crit, True, bound, alloc.real_total(bound), nA, nB, achieved, "closed_form")


def alc_unknown_search(
    prior: CollectivePrior,
    l: float,
    alpha0: float,
    c: float,
    alloc: Allocation = Allocation(),
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> SSDResult:
    """Smallest total whose quadrature-averaged interval length is at most ``l``."""
    crit = ALC(l, alpha0)
    vm = UnknownVariance(c)
    prior_only = average_length(prior, vm, 0, 0, alpha0, spec)
    if prior_only <= l:
        return SSDResult(crit, True, None, None, 0, 0, prior_only, "search")

    def ok(n):
        return average_length(prior, vm, *alloc.split(n), alpha0, spec) <= l

    n = smallest_satisfying(ok, start=2)
    nA, nB = alloc.split(n)
    achieved = average_length(prior, vm, nA, nB, alpha0, spec)
    return SSDResult(crit, True, None, None, nA, nB, achieved, "search")


def solve(
    prior: CollectivePrior,
    crit: Criterion,
    vm: VarianceModel,
    alloc: Allocation = Allocation(),
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> SSDResult:
    if isinstance(vm, KnownVariance):
        bound = effective_bound_known(prior, crit, vm.sigma2)
        return _closed_form(prior, crit, vm, alloc, bound, spec)
    if isinstance(crit, ALC):
        return alc_unknown_search(prior, crit.l, crit.alpha0, vm.c, alloc, spec)
    bound = effective_bound_unknown(prior, crit, vm.c)
    return _closed_form(prior, crit, vm, alloc, bound, spec)


def optimal_benchmark(
    prior: CollectivePrior,
    crit: Criterion,
    alloc: Allocation = Allocation(),
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> SSDResult:
    """Best case: the new-data variance equals the collective prior variance."""
    return solve(prior, crit, KnownVariance(prior.variance), alloc, spec)
