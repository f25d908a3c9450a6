"""Per-source commensurate predictive prior.

A historical parameter is projected onto the new-experiment scale through a
normal predictive distribution whose precision carries a two-component Gamma
mixture prior.  Integrating the precision out gives a two-component mixture
of location-scale t densities; its first two moments define the normal
surrogate used when the sources are combined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .distributions import (
    DEFAULT_QUADRATURE,
    LocationScaleT,
    NormalParams,
    QuadratureSpec,
    integrate,
)
from .errors import DomainError, InvalidHyperparameterError, UndefinedMomentError

__all__ = [
    "GammaMixtureHyper",
    "TMixtureMarginal",
    "check_weight",
    "marginal_t_mixture",
    "normal_approximation",
    "predictive_variance",
    "mixture_moments_oracle",
    "approximation_error",
]


def check_weight(w: float) -> float:
    """Validate a prior probability of incommensurability."""
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"incommensurability weight w must lie in [0, 1], got {w!r}")
    return w


@dataclass(frozen=True)
class GammaMixtureHyper:
    """Hyperparameters of ``w Gamma(a01, b01) + (1 - w) Gamma(a02, b02)``.

    Component 1 is the vague (down-weighting) one and must imply a larger
    predictive variance than component 2; a misordered pair is rejected.
    """

    a01: float
    b01: float
    a02: float
    b02: float

    def __post_init__(self):
        for name in ("a01", "b01", "a02", "b02"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidHyperparameterError(
                    f"{name} must be a finite positive number, got {value!r}"
                )
        if self.a01 > 1 and self.a02 > 1:
            vague, strong = self.component_variances()
            ordered = vague > strong
        else:
            # variances undefined; compare mean precisions instead
            ordered = self.a01 / self.b01 < self.a02 / self.b02
        if not ordered:
            raise InvalidHyperparameterError(
                "component 1 (a01, b01) must be the vague component: need "
                "b01/(a01-1) > b02/(a02-1); got "
                f"Gamma({self.a01}, {self.b01}) and Gamma({self.a02}, {self.b02})"
            )

    def require_moments(self) -> None:
        if not (self.a01 > 1 and self.a02 > 1):
            raise InvalidHyperparameterError(
                f"the normal approximation needs a01 > 1 and a02 > 1 "
                f"(got a01={self.a01}, a02={self.a02})"
            )

    def component_variances(self) -> tuple[float, float]:
        """Predictive variances b/(a-1) implied by each component alone."""
        self.require_moments()
        return self.b01 / (self.a01 - 1.0), self.b02 / (self.a02 - 1.0)

    def replace(self, **changes) -> "GammaMixtureHyper":
        values = {k: getattr(self, k) for k in ("a01", "b01", "a02", "b02")}
        values.update(changes)
        return GammaMixtureHyper(**values)


@dataclass(frozen=True)
class TMixtureMarginal:
    weight: float
    component1: LocationScaleT
    component2: LocationScaleT

    def __post_init__(self):
        check_weight(self.weight)
        if self.component1.location != self.component2.location:
            raise DomainError("mixture components must share their location")

    @property
    def location(self) -> float:
        return self.component1.location

    def pdf(self, x):
        w = self.weight
        return w * self.component1.pdf(x) + (1.0 - w) * self.component2.pdf(x)

    def cdf(self, x):
        w = self.weight
        return w * self.component1.cdf(x) + (1.0 - w) * self.component2.cdf(x)

    def variance(self) -> float:
        """Closed-form variance; components with zero weight are ignored."""
        total = 0.0
        for share, comp in ((self.weight, self.component1), (1.0 - self.weight, self.component2)):
            if share > 0.0:
                total += share * comp.variance()
        return total


def marginal_t_mixture(theta_k: float, w: float, hyper: GammaMixtureHyper) -> TMixtureMarginal:
    """Marginal of the predictive parameter after integrating out its precision.

    Component j is a t density with ``2 a0j`` degrees of freedom, location
    ``theta_k`` and squared scale ``b0j / a0j``.
    """
    w = check_weight(w)
    comp1 = LocationScaleT(2.0 * hyper.a01, theta_k, math.sqrt(hyper.b01 / hyper.a01))
    comp2 = LocationScaleT(2.0 * hyper.a02, theta_k, math.sqrt(hyper.b02 / hyper.a02))
    return TMixtureMarginal(w, comp1, comp2)


def predictive_variance(w: float, hyper: GammaMixtureHyper) -> float:
    """Variance of the moment-matched normal: ``w b01/(a01-1) + (1-w) b02/(a02-1)``."""
    w = check_weight(w)
    vague, strong = hyper.component_variances()
    return w * vague + (1.0 - w) * strong


def normal_approximation(theta_k: float, w: float, hyper: GammaMixtureHyper) -> NormalParams:
    return NormalParams(theta_k, predictive_variance(w, hyper))


def mixture_moments_oracle(
    m: TMixtureMarginal, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> tuple[float, float]:
    """Mean and variance of a t mixture by direct quadrature.

    Independent of the closed form: it only evaluates the mixture density.
    """
    for comp in (m.component1, m.component2):
        if comp.df <= 2.0:
            raise UndefinedMomentError(
                f"mixture variance is infinite: component df={comp.df} <= 2"
            )
    loc = m.location

    def density(x):
        return float(m.pdf(x))

    lo_mass, _ = integrate(density, -math.inf, loc, spec)
    hi_mass, _ = integrate(density, loc, math.inf, spec)
    lo_first, _ = integrate(lambda x: (x - loc) * density(x), -math.inf, loc, spec)
    hi_first, _ = integrate(lambda x: (x - loc) * density(x), loc, math.inf, spec)
    mass = lo_mass + hi_mass
    mean = loc + (lo_first + hi_first) / mass
    lo_second, _ = integrate(lambda x: (x - mean) ** 2 * density(x), -math.inf, loc, spec)
    hi_second, _ = integrate(lambda x: (x - mean) ** 2 * density(x), loc, math.inf, spec)
    return mean, (lo_second + hi_second) / mass


def _crossings(diff, lo: float, hi: float, grid: int = 2001) -> list[float]:
    xs = np.linspace(lo, hi, grid)
    ys = diff(xs)
    roots = []
    for i in range(grid - 1):
        if ys[i] == 0.0:
            roots.append(float(xs[i]))
        elif ys[i] * ys[i + 1] < 0.0:
            roots.append(optimize.brentq(lambda x: float(diff(x)), xs[i], xs[i + 1], xtol=1e-14))
    return roots


def approximation_error(
    m: TMixtureMarginal, n: NormalParams, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Total-variation distance ``0.5 * integral |f_mixture - f_normal|``.

    The real line is cut at the points where the two densities cross so each
    panel integrates a smooth function.
    """
    def diff(x):
        return m.pdf(x) - n.pdf(x)

    spread = 40.0 * max(math.sqrt(n.variance), m.component1.scale, m.component2.scale)
    lo = min(m.location, n.mean) - spread
    hi = max(m.location, n.mean) + spread
    cuts = [lo] + _crossings(diff, lo, hi) + [hi]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        total += abs(integrate(lambda x: float(diff(x)), a, b, spec)[0])
    # tails beyond the window: mixture t tails dominate the normal ones there
    total += abs(integrate(lambda x: float(diff(x)), -math.inf, lo, spec)[0])
    total += abs(integrate(lambda x: float(diff(x)), hi, math.inf, spec)[0])
    return min(1.0, max(0.0, 0.5 * total))
