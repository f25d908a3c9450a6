"""Probability kernels and one-dimensional quadrature.

Normal, Gamma (shape/rate), Inverse-Gamma (shape/scale) and location-scale
Student-t distributions, each an immutable value object with ``pdf``,
``cdf``, ``quantile`` and moment methods.  Special functions come from
:mod:`scipy.special`; adaptive integration is QUADPACK via
:func:`scipy.integrate.quad` wrapped by :func:`integrate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _integrate
from scipy import special

from .errors import DomainError, QuadratureError, UndefinedMomentError

__all__ = [
    "NormalParams",
    "GammaParams",
    "InvGammaParams",
    "LocationScaleT",
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "normal_cdf",
    "normal_quantile",
    "standard_normal_upper",
    "gamma_summary",
    "invgamma_mean",
    "t_pdf",
    "integrate",
]


def _check_probability(q: float) -> None:
    if not 0.0 < q < 1.0:
        raise DomainError(f"probability must lie strictly in (0, 1), got {q!r}")


def _check_positive(name: str, value: float) -> None:
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class NormalParams:
    mean: float
    variance: float

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise DomainError(f"mean must be finite, got {self.mean!r}")
        _check_positive("variance", self.variance)

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.sd
        return np.exp(-0.5 * z * z) / (self.sd * math.sqrt(2.0 * math.pi))

    def cdf(self, x):
        return special.ndtr((np.asarray(x, dtype=float) - self.mean) / self.sd)

    def quantile(self, q: float) -> float:
        _check_probability(q)
        return self.mean + self.sd * float(special.ndtri(q))


@dataclass(frozen=True)
class GammaParams:
    """Gamma distribution with density proportional to x**(shape-1) exp(-rate x)."""

    shape: float
    rate: float

    def __post_init__(self):
        _check_positive("shape", self.shape)
        _check_positive("rate", self.rate)

    def mean(self) -> float:
        return self.shape / self.rate

    def variance(self) -> float:
        return self.shape / self.rate**2

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            logp = (
                self.shape * math.log(self.rate)
                - special.gammaln(self.shape)
                + (self.shape - 1.0) * np.log(x)
                - self.rate * x
            )
        return np.where(x > 0, np.exp(logp), 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return special.gammainc(self.shape, self.rate * np.maximum(x, 0.0))

    def quantile(self, q: float) -> float:
        _check_probability(q)
        return float(special.gammaincinv(self.shape, q)) / self.rate


@dataclass(frozen=True)
class InvGammaParams:
    """Inverse-Gamma: if X ~ Gamma(shape, rate=scale) then 1/X ~ InvGamma(shape, scale)."""

    shape: float
    scale: float

    def __post_init__(self):
        _check_positive("shape", self.shape)
        _check_positive("scale", self.scale)

    def mean(self) -> float:
        if self.shape <= 1.0:
            raise UndefinedMomentError(
                f"Inv-Gamma mean requires shape > 1 (got shape={self.shape!r})"
            )
        return self.scale / (self.shape - 1.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            logp = (
                self.shape * math.log(self.scale)
                - special.gammaln(self.shape)
                - (self.shape + 1.0) * np.log(x)
                - self.scale / x
            )
            out = np.exp(logp)
        return np.where(x > 0, out, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x > 0, x, 1.0)
        return np.where(x > 0, special.gammaincc(self.shape, self.scale / safe), 0.0)

    def quantile(self, q: float) -> float:
        _check_probability(q)
        return self.scale / float(special.gammainccinv(self.shape, q))


@dataclass(frozen=True)
class LocationScaleT:
    """Student-t shifted by ``location`` and stretched by ``scale`` (an sd-like scale)."""

    df: float
    location: float
    scale: float

    def __post_init__(self):
        _check_positive("df", self.df)
        _check_positive("scale", self.scale)
        if not math.isfinite(self.location):
            raise DomainError(f"location must be finite, got {self.location!r}")

    def _log_norm(self) -> float:
        v = self.df
        return (
            special.gammaln((v + 1.0) / 2.0)
            - special.gammaln(v / 2.0)
            - 0.5 * math.log(v * math.pi)
            - math.log(self.scale)
        )

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.location) / self.scale
        return np.exp(self._log_norm() - (self.df + 1.0) / 2.0 * np.log1p(z * z / self.df))

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.location) / self.scale
        return special.stdtr(self.df, z)

    def quantile(self, q: float) -> float:
        _check_probability(q)
        return self.location + self.scale * float(special.stdtrit(self.df, q))

    def mean(self) -> float:
        if self.df <= 1.0:
            raise UndefinedMomentError(f"t mean requires df > 1 (got df={self.df!r})")
        return self.location

    def variance(self) -> float:
        if self.df <= 2.0:
            raise UndefinedMomentError(f"t variance requires df > 2 (got df={self.df!r})")
        return self.df / (self.df - 2.0) * self.scale**2


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-9
    absolute_tolerance: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        _check_positive("relative_tolerance", self.relative_tolerance)
        _check_positive("absolute_tolerance", self.absolute_tolerance)
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError(
                f"max_subdivisions must be an integer >= 1, got {self.max_subdivisions!r}"
            )


DEFAULT_QUADRATURE = QuadratureSpec()


def normal_cdf(x: float, p: NormalParams = NormalParams(0.0, 1.0)) -> float:
    return float(p.cdf(x))


def normal_quantile(q: float, p: NormalParams = NormalParams(0.0, 1.0)) -> float:
    return p.quantile(q)


def standard_normal_upper(tail: float) -> float:
    """Upper ``tail`` quantile of N(0, 1), i.e. z such that P(Z > z) = tail."""
    _check_probability(tail)
    return -float(special.ndtri(tail))


def gamma_summary(p: GammaParams, level: float = 0.95) -> tuple[float, float, float]:
    """Mean and equal-tailed ``level`` interval of a Gamma distribution."""
    _check_probability(level)
    tail = (1.0 - level) / 2.0
    return p.mean(), p.quantile(tail), p.quantile(1.0 - tail)


def invgamma_mean(p: InvGammaParams) -> float:
    return p.mean()


def t_pdf(x: float, p: LocationScaleT) -> float:
    return float(p.pdf(x))


def integrate(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    points=None,
) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[lower, upper]``.

    Either bound may be infinite; QUADPACK then maps the range onto (0, 1]
    before subdividing.  Returns ``(value, error_estimate)``.

    Raises:
        QuadratureError: if the subdivision budget is exhausted or the
            error estimate exceeds both tolerances.  The exception carries
            the best estimate reached.
    """
    if lower == upper:
        return 0.0, 0.0
    if lower > upper:
        value, err = integrate(f, upper, lower, spec, points)
        return -value, err
    kwargs = {}
    if points is not None and math.isfinite(lower) and math.isfinite(upper):
        kwargs["points"] = [p for p in points if lower < p < upper]
    result = _integrate.quad(
        f,
        lower,
        upper,
        epsabs=spec.absolute_tolerance,
        epsrel=spec.relative_tolerance,
        limit=int(spec.max_subdivisions),
        full_output=1,
        **kwargs,
    )
    value, err = float(result[0]), float(result[1])
    # QUADPACK appends a message only when ier != 0
    message = result[3] if len(result) > 3 else None
    target = max(spec.absolute_tolerance, spec.relative_tolerance * abs(value))
    if not math.isfinite(value) or (message is not None and err > target):
        raise QuadratureError(
            f"quadrature did not converge on [{lower}, {upper}] "
            f"(estimate={value!r}, error={err!r}): {message}",
            value=value,
            error_estimate=err,
        )
    return value, err
