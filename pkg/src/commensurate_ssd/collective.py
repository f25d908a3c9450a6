"""Synthesis of K historical summaries into one normal prior for the new effect.

Each source contributes its moment-matched normal (historical posterior
variance plus commensurate predictive variance).  The collective prior is
the distribution of the p-weighted sum of those independent normals, with
``p`` a softmax of ``-w**2 / s0`` over the incommensurability weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.special import softmax

from .commensurate import GammaMixtureHyper, check_weight, predictive_variance
from .distributions import NormalParams, standard_normal_upper
from .errors import DomainError

__all__ = [
    "HistoricalSummary",
    "WeightRule",
    "SourceContribution",
    "CollectivePrior",
    "WEIGHTING_MODES",
    "compute_weights",
    "build_collective_prior",
    "prior_credible_interval",
    "hellinger_squared",
    "hellinger_matrix",
    "special_weighting",
    "most_informative_source",
]

WEIGHTING_MODES = ("robust", "no_robustification", "no_borrowing", "single_source")


@dataclass(frozen=True)
class HistoricalSummary:
    """Normal summary N(m, v) of one historical parameter plus its weight w.

    ``v`` is a variance, never a standard deviation.
    """

    m: float
    v: float
    w: float

    def __post_init__(self):
        if not math.isfinite(self.m):
            raise DomainError(f"source mean m must be finite, got {self.m!r}")
        if not (self.v > 0 and math.isfinite(self.v)):
            raise DomainError(f"source variance v must be positive, got {self.v!r}")
        check_weight(self.w)

    @property
    def normal(self) -> NormalParams:
        return NormalParams(self.m, self.v)


@dataclass(frozen=True)
class WeightRule:
    s0: float = 0.05

    def __post_init__(self):
        if not (self.s0 > 0 and math.isfinite(self.s0)):
            raise DomainError(f"weight concentration s0 must be positive, got {self.s0!r}")


@dataclass(frozen=True)
class SourceContribution:
    lam: float
    xi2: float
    p: float


@dataclass(frozen=True)
class CollectivePrior:
    per_source: tuple[SourceContribution, ...]
    mean: float
    variance: float

    @property
    def K(self) -> int:
        return len(self.per_source)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(s.p for s in self.per_source)

    @property
    def normal(self) -> NormalParams:
        return NormalParams(self.mean, self.variance)

    @classmethod
    def from_moments(cls, mean: float, variance: float) -> "CollectivePrior":
        """A prior given directly by its moments (one pseudo-source)."""
        if not variance > 0:
            raise DomainError(f"prior variance must be positive, got {variance!r}")
        return cls((SourceContribution(mean, variance, 1.0),), mean, variance)


def compute_weights(ws: Sequence[float], rule: WeightRule = WeightRule()) -> list[float]:
    """Source weights ``p_k ∝ exp(-w_k**2 / s0)``, normalised to one."""
    if len(ws) == 0:
        raise DomainError("at least one incommensurability weight is required")
    w = np.array([check_weight(x) for x in ws], dtype=float)
    p = softmax(-(w * w) / rule.s0)
    return [float(x) for x in p]


def _assemble(sources: Sequence[HistoricalSummary], p: Sequence[float], hyper: GammaMixtureHyper) -> CollectivePrior:
    parts = tuple(
        SourceContribution(src.m, src.v + predictive_variance(src.w, hyper), float(pk))
        for src, pk in zip(sources, p)
    )
    mean = math.fsum(c.p * c.lam for c in parts)
    variance = math.fsum(c.p * c.p * c.xi2 for c in parts)
    return CollectivePrior(parts, mean, variance)


def build_collective_prior(
    sources: Sequence[HistoricalSummary],
    hyper: GammaMixtureHyper,
    rule: WeightRule = WeightRule(),
) -> CollectivePrior:
    if len(sources) == 0:
        raise DomainError("at least one historical source is required")
    hyper.require_moments()
    p = compute_weights([s.w for s in sources], rule)
    return _assemble(sources, p, hyper)


def prior_credible_interval(prior: CollectivePrior, level: float = 0.95) -> tuple[float, float]:
    if not 0.0 < level < 1.0:
        raise DomainError(f"credible level must lie in (0, 1), got {level!r}")
    half = standard_normal_upper((1.0 - level) / 2.0) * math.sqrt(prior.variance)
    return prior.mean - half, prior.mean + half


def hellinger_squared(p: NormalParams, q: NormalParams) -> float:
    """Squared Hellinger distance between two univariate normals (closed form)."""
    total = p.variance + q.variance
    bc = math.sqrt(2.0 * p.sd * q.sd / total) * math.exp(-((p.mean - q.mean) ** 2) / (4.0 * total))
    return min(1.0, max(0.0, 1.0 - bc))


def hellinger_matrix(sources: Sequence[HistoricalSummary]) -> list[list[float]]:
    normals = [s.normal for s in sources]
    return [[hellinger_squared(a, b) for b in normals] for a in normals]


def most_informative_source(sources: Sequence[HistoricalSummary]) -> int:
    """1-based index of the source with the smallest variance (first on ties)."""
    return min(range(len(sources)), key=lambda i: sources[i].v) + 1


def special_weighting(
    sources: Sequence[HistoricalSummary],
    hyper: GammaMixtureHyper,
    rule: WeightRule = WeightRule(),
    mode: str = "robust",
    k: int | None = None,
) -> CollectivePrior:
    """Collective prior under one of the comparison weightings.

    ``no_robustification`` sets every w to 0, ``no_borrowing`` sets every w
    to 1, and ``single_source`` puts all weight on source ``k`` (1-based,
    defaulting to the most informative one) while keeping its own w.
    """
    if mode == "robust":
        return build_collective_prior(sources, hyper, rule)
    if mode == "no_robustification":
        return build_collective_prior([replace(s, w=0.0) for s in sources], hyper, rule)
    if mode == "no_borrowing":
        return build_collective_prior([replace(s, w=1.0) for s in sources], hyper, rule)
    if mode == "single_source":
        if k is None:
            k = most_informative_source(sources)
        if not 1 <= k <= len(sources):
            raise DomainError(f"single_source index {k} out of range 1..{len(sources)}")
        hyper.require_moments()
        p = [1.0 if i == k - 1 else 0.0 for i in range(len(sources))]
        return _assemble(sources, p, hyper)
    raise DomainError(f"unknown weighting mode {mode!r}; expected one of {WEIGHTING_MODES}")
