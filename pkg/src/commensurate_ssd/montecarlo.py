"""Seed-deterministic simulation of the three design criteria.

The generator is SplitMix64 used in counter mode: the i-th 64-bit word of a
stream seeded with ``s`` is ``mix(s + (i + 1) * 0x9E3779B97F4A7C15)``.  This
is easy to reproduce in any language and vectorises directly in numpy.
Draws are split into fixed-size chunks, each with its own stream seeded from
the plan seed and the chunk index, and the per-chunk sums are reduced in
chunk order.  Results therefore depend on ``(inputs, seed, chunk_size)`` only,
never on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from .collective import CollectivePrior
from .distributions import InvGammaParams, NormalParams, standard_normal_upper
from .errors import DomainError
from .posterior import KnownVariance, UnknownVariance, VarianceModel, sampling_factor

__all__ = [
    "SimulationPlan",
    "SimulationEstimate",
    "SplitMix64",
    "splitmix64",
    "sample_normal",
    "sample_gamma",
    "sample_invgamma",
    "simulate_average_coverage",
    "simulate_average_length",
    "simulate_average_posterior_variance",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def splitmix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finaliser applied elementwise to uint64 values."""
    z = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Counter-based SplitMix64 stream.

    Not thread-safe; each chunk of a simulation owns its own instance.
    """

    def __init__(self, seed: int):
        self.seed = np.uint64(int(seed) & _MASK64)
        self.counter = 0

    def next_uint64(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            state = self.seed + idx * _GOLDEN
        return splitmix64(state)

    def uniform(self, n: int) -> np.ndarray:
        """Doubles strictly inside (0, 1) from the top 53 bits."""
        bits = self.next_uint64(n) >> np.uint64(11)
        return (bits.astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)

    @classmethod
    def substream(cls, seed: int, index: int) -> "SplitMix64":
        """Independent stream for chunk ``index`` of a plan seeded with ``seed``."""
        parent = SplitMix64(seed)
        parent.counter = int(index)
        return cls(int(parent.next_uint64(1)[0]))


def sample_normal(rng: SplitMix64, n: int, params: NormalParams | None = None) -> np.ndarray:
    """Box-Muller normals; each pair of uniforms yields two variates."""
    pairs = (n + 1) // 2
    u = rng.uniform(2 * pairs)
    radius = np.sqrt(-2.0 * np.log(u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]
    if params is None:
        return z
    return params.mean + params.sd * z


def sample_gamma(rng: SplitMix64, n: int, shape: float) -> np.ndarray:
    """Gamma(shape, 1) variates by Marsaglia-Tsang squeeze/rejection.

    Shapes below one use the boost ``G(a) = G(a + 1) * U**(1/a)``.
    """
    if not shape > 0:
        raise DomainError(f"gamma shape must be positive, got {shape!r}")
    boost = shape < 1.0
    a = shape + 1.0 if boost else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        batch = need + need // 20 + 16
        x = sample_normal(rng, batch)
        u = rng.uniform(batch)
        v = (1.0 + c * x) ** 3
        ok = v > 0.0
        safe_v = np.where(ok, v, 1.0)
        x2 = x * x
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        accept = ok & (squeeze | (np.log(u) < 0.5 * x2 + d * (1.0 - safe_v + np.log(safe_v))))
        got = (d * safe_v)[accept][:need]
        out[filled:filled + got.size] = got
        filled += got.size
    if boost:
        out *= rng.uniform(n) ** (1.0 / shape)
    return out


def sample_invgamma(rng: SplitMix64, n: int, params: InvGammaParams) -> np.ndarray:
    return params.scale / sample_gamma(rng, n, params.shape)


@dataclass(frozen=True)
class SimulationPlan:
    draws: int = 100_000
    seed: int = 20240101
    chunk_size: int = 50_000

    def __post_init__(self):
        if int(self.draws) != self.draws or self.draws < 1:
            raise DomainError(f"draws must be a positive integer, got {self.draws!r}")
        if int(self.chunk_size) != self.chunk_size or self.chunk_size < 1:
            raise DomainError(f"chunk_size must be a positive integer, got {self.chunk_size!r}")
        if not 0 <= int(self.seed) <= _MASK64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def chunks(self) -> list[tuple[int, int]]:
        sizes = []
        start = 0
        index = 0
        while start < self.draws:
            size = min(self.chunk_size, self.draws - start)
            sizes.append((index, size))
            start += size
            index += 1
        return sizes


@dataclass(frozen=True)
class SimulationEstimate:
    value: float
    std_error: float
    draws_used: int


def _variance_draws(rng, n, vm: VarianceModel, S: float) -> np.ndarray:
    if isinstance(vm, KnownVariance):
        return np.full(n, vm.sigma2)
    if isinstance(vm, UnknownVariance):
        return sample_invgamma(rng, n, vm.prior(S))
    raise DomainError(f"unknown variance model {vm!r}")


def _run(chunk_fn, plan: SimulationPlan, workers: int) -> SimulationEstimate:
    def one(chunk):
        index, size = chunk
        values = chunk_fn(SplitMix64.substream(plan.seed, index), size)
        return math.fsum(values), math.fsum(values * values)

    chunks = plan.chunks()
    if workers <= 1:
        sums = [one(ch) for ch in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(one, chunks))
    total = 0.0
    total_sq = 0.0
    for s, sq in sums:
        total += s
        total_sq += sq
    n = plan.draws
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return SimulationEstimate(mean, math.sqrt(var / n), n)


def _posterior_var(S, k, sigma2):
    if math.isinf(k):
        return np.full_like(sigma2, S)
    return 1.0 / (1.0 / S + 1.0 / (k * sigma2))


def simulate_average_coverage(
    prior: CollectivePrior,
    vm: VarianceModel,
    nA: int,
    nB: int,
    l0: float,
    plan: SimulationPlan = SimulationPlan(),
    mode: str = "joint",
    workers: int = 1,
) -> SimulationEstimate:
    """Monte Carlo average coverage of the interval posterior mean ± l0/2.

    ``joint`` draws the variance, the effect and the observed difference and
    scores whether the effect lands inside the interval.  ``conditional``
    draws only the variance and averages the exact posterior coverage.
    """
    if mode not in ("joint", "conditional"):
        raise DomainError(f"mode must be 'joint' or 'conditional', got {mode!r}")
    if not l0 > 0:
        raise DomainError(f"l0 must be positive, got {l0!r}")
    M, S = prior.mean, prior.variance
    k = sampling_factor(nA, nB)

    def chunk(rng, n):
        sigma2 = _variance_draws(rng, n, vm, S)
        if mode == "conditional":
            post_var = _posterior_var(S, k, sigma2)
            return special.erf(l0 / (2.0 * np.sqrt(2.0 * post_var)))
        mu = M + math.sqrt(S) * sample_normal(rng, n)
        if math.isinf(k):
            eta = np.full(n, M)
        else:
            noise = k * sigma2
            xbar = mu + np.sqrt(noise) * sample_normal(rng, n)
            eta = (noise * M + S * xbar) / (S + noise)
        return (np.abs(mu - eta) <= l0 / 2.0).astype(float)

    return _run(chunk, plan, workers)


def simulate_average_length(
    prior: CollectivePrior,
    vm: VarianceModel,
    nA: int,
    nB: int,
    alpha0: float,
    plan: SimulationPlan = SimulationPlan(),
    workers: int = 1,
) -> SimulationEstimate:
    z = standard_normal_upper(alpha0 / 2.0)
    S = prior.variance
    k = sampling_factor(nA, nB)
    if isinstance(vm, KnownVariance):
        return SimulationEstimate(2.0 * z * math.sqrt(float(_posterior_var(S, k, np.array(vm.sigma2)))), 0.0, plan.draws)

    def chunk(rng, n):
        return 2.0 * z * np.sqrt(_posterior_var(S, k, _variance_draws(rng, n, vm, S)))

    return _run(chunk, plan, workers)


def simulate_average_posterior_variance(
    prior: CollectivePrior,
    vm: VarianceModel,
    nA: int,
    nB: int,
    plan: SimulationPlan = SimulationPlan(),
    workers: int = 1,
) -> SimulationEstimate:
    S = prior.variance
    k = sampling_factor(nA, nB)
    if isinstance(vm, KnownVariance):
        return SimulationEstimate(float(_posterior_var(S, k, np.array(vm.sigma2))), 0.0, plan.draws)

    def chunk(rng, n):
        return _posterior_var(S, k, _variance_draws(rng, n, vm, S))

    return _run(chunk, plan, workers)
