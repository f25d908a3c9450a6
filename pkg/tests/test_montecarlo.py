import math
import random

import numpy as np
import pytest

from commensurate_ssd.collective import CollectivePrior, HistoricalSummary, build_collective_prior
from commensurate_ssd.distributions import InvGammaParams, standard_normal_upper
from commensurate_ssd.errors import DomainError
from commensurate_ssd.montecarlo import (
    SimulationPlan,
    SplitMix64,
    sample_gamma,
    sample_invgamma,
    sample_normal,
    simulate_average_coverage,
    simulate_average_length,
    simulate_average_posterior_variance,
    splitmix64,
)
from commensurate_ssd.posterior import KnownVariance, UnknownVariance, sampling_factor
from commensurate_ssd.ssd import (
    Allocation,
    average_coverage,
    average_length,
    average_posterior_variance,
    posterior_variance,
)

from conftest import HYPER, RULE, sources_for


class TestGenerator:
    def test_reference_words(self):
        # first outputs of the reference SplitMix64 stream seeded with 0
        rng = SplitMix64(0)
        words = [int(x) for x in rng.next_uint64(3)]
        assert words == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]

    def test_counter_continues(self):
        a = SplitMix64(5)
        first = a.next_uint64(4)
        rest = a.next_uint64(3)
        b = SplitMix64(5)
        np.testing.assert_array_equal(np.concatenate([first, rest]), b.next_uint64(7))

    def test_uniform_open_interval(self):
        u = SplitMix64(11).uniform(200_000)
        assert u.min() > 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 3 * math.sqrt(1 / 12 / u.size)

    def test_substreams_differ(self):
        a = SplitMix64.substream(7, 0).next_uint64(4)
        b = SplitMix64.substream(7, 1).next_uint64(4)
        assert not np.array_equal(a, b)

    def test_finaliser_is_elementwise(self):
        x = np.array([1, 2, 3], dtype=np.uint64)
        np.testing.assert_array_equal(splitmix64(x), [splitmix64(np.uint64(v)) for v in x])


class TestSamplers:
    def test_normal_moments(self):
        n = 1_000_000
        z = sample_normal(SplitMix64(2024), n)
        assert abs(z.mean()) < 3 / math.sqrt(n)
        assert abs(z.var(ddof=1) - 1.0) < 3 * math.sqrt(2.0 / (n - 1))

    def test_invgamma_mean(self):
        n = 1_000_000
        ig = InvGammaParams(2.5, 0.385)
        x = sample_invgamma(SplitMix64(77), n, ig)
        se = x.std(ddof=1) / math.sqrt(n)
        assert abs(x.mean() - 0.25667) < 3 * se

    @pytest.mark.parametrize("shape", [0.3, 1.0, 2.5, 18.0])
    def test_gamma_moments(self, shape):
        n = 400_000
        g = sample_gamma(SplitMix64(int(shape * 100)), n, shape)
        assert (g > 0).all()
        assert abs(g.mean() - shape) < 4 * math.sqrt(shape / n)

    def test_gamma_rejects_bad_shape(self):
        with pytest.raises(DomainError):
            sample_gamma(SplitMix64(1), 10, 0.0)


class TestPlan:
    def test_chunks_cover_draws(self):
        plan = SimulationPlan(draws=125, seed=3, chunk_size=50)
        assert plan.chunks() == [(0, 50), (1, 50), (2, 25)]

    @pytest.mark.parametrize("kwargs", [{"draws": 0}, {"chunk_size": 0}, {"seed": -1}, {"draws": 2.5}])
    def test_validation(self, kwargs):
        with pytest.raises(DomainError):
            SimulationPlan(**kwargs)


@pytest.fixture(scope="module")
def prior():
    return CollectivePrior.from_moments(-0.3086535744944612, 0.1541808900420388)


class TestDeterminism:
    def test_repeatable(self, prior):
        plan = SimulationPlan(60_000, 42, 7_000)
        a = simulate_average_coverage(prior, UnknownVariance(5.0), 12, 12, 0.65, plan)
        b = simulate_average_coverage(prior, UnknownVariance(5.0), 12, 12, 0.65, plan)
        assert a == b

    @pytest.mark.parametrize("workers", [2, 3, 8])
    def test_independent_of_workers(self, prior, workers):
        plan = SimulationPlan(60_000, 42, 7_000)
        vm = UnknownVariance(5.0)
        assert simulate_average_coverage(prior, vm, 12, 12, 0.65, plan) == simulate_average_coverage(
            prior, vm, 12, 12, 0.65, plan, workers=workers
        )
        assert simulate_average_length(prior, vm, 12, 12, 0.05, plan) == simulate_average_length(
            prior, vm, 12, 12, 0.05, plan, workers=workers
        )

    def test_seed_changes_result(self, prior):
        vm = UnknownVariance(5.0)
        a = simulate_average_posterior_variance(prior, vm, 12, 12, SimulationPlan(20_000, 1))
        b = simulate_average_posterior_variance(prior, vm, 12, 12, SimulationPlan(20_000, 2))
        assert a.value != b.value


class TestCoverage:
    def test_known_solution_meets_target(self, prior):
        est = simulate_average_coverage(prior, KnownVariance(0.35), 21, 21, 0.65, SimulationPlan(100_000, 5))
        assert est.value + 3 * est.std_error >= 0.95

    def test_analytic_known_value(self, prior):
        post = posterior_variance(prior.variance, sampling_factor(21, 21), 0.35)
        exact = math.erf(0.65 / (2 * math.sqrt(2 * post)))
        est = simulate_average_coverage(prior, KnownVariance(0.35), 21, 21, 0.65, SimulationPlan(200_000, 6))
        assert abs(est.value - exact) < 3 * est.std_error

    def test_conditional_mode_exact_when_known(self, prior):
        exact = average_coverage(prior, KnownVariance(0.35), 21, 21, 0.65)
        est = simulate_average_coverage(
            prior, KnownVariance(0.35), 21, 21, 0.65, SimulationPlan(1_000, 6), mode="conditional"
        )
        assert est.value == pytest.approx(exact, rel=1e-12)
        assert est.std_error == pytest.approx(0.0, abs=1e-12)

    def test_huge_interval_covers(self, prior):
        est = simulate_average_coverage(prior, UnknownVariance(3.0), 4, 4, 1e6, SimulationPlan(10_000, 1))
        assert est.value == 1.0

    def test_bad_mode(self, prior):
        with pytest.raises(DomainError):
            simulate_average_coverage(prior, KnownVariance(0.35), 2, 2, 0.5, mode="exact")


class TestLength:
    def test_known_is_constant(self, prior):
        est = simulate_average_length(prior, KnownVariance(0.35), 21, 21, 0.05, SimulationPlan(10, 1))
        z = standard_normal_upper(0.025)
        post = posterior_variance(prior.variance, sampling_factor(21, 21), 0.35)
        assert est.value == 2 * z * math.sqrt(post)
        assert est.std_error == 0.0

    def test_search_threshold(self, prior):
        vm = UnknownVariance(5.0)
        plan = SimulationPlan(1_000_000, 13)
        at = simulate_average_length(prior, vm, 12, 12, 0.05, plan)
        below = simulate_average_length(prior, vm, 12, 11, 0.05, plan)
        assert at.value - 3 * at.std_error <= 0.65
        assert below.value > 0.65
        assert abs(at.value - average_length(prior, vm, 12, 12, 0.05)) < 4 * at.std_error

    def test_bounded_by_prior_length(self, prior):
        cap = 2 * standard_normal_upper(0.025) * math.sqrt(prior.variance)
        for n in (0, 2, 10, 100):
            est = simulate_average_length(prior, UnknownVariance(3.0), *Allocation().split(n), 0.05, SimulationPlan(5_000, n))
            assert est.value <= cap + 1e-12


class TestPosteriorVariance:
    def test_known_exact(self, prior):
        est = simulate_average_posterior_variance(prior, KnownVariance(0.35), 19, 19, SimulationPlan(10, 1))
        assert est.value == posterior_variance(prior.variance, sampling_factor(19, 19), 0.35)

    def test_unknown_solution(self, prior):
        est = simulate_average_posterior_variance(prior, UnknownVariance(5.0), 14, 14, SimulationPlan(1_000_000, 17))
        assert est.value - 3 * est.std_error <= 0.03

    def test_contracts(self, prior):
        est = simulate_average_posterior_variance(prior, UnknownVariance(3.0), 3, 2, SimulationPlan(20_000, 9))
        assert est.value < prior.variance


def random_configuration(rnd: random.Random):
    k = rnd.randint(1, 5)
    sources = [HistoricalSummary(rnd.uniform(-1, 1), rnd.uniform(0.05, 0.5), rnd.uniform(0, 1)) for _ in range(k)]
    return build_collective_prior(sources, HYPER, RULE), UnknownVariance(rnd.choice([3.0, 5.0, 10.0])), rnd.randint(4, 60)


@pytest.mark.parametrize("index", range(20))
def test_oracle_agreement(index):
    rnd = random.Random(1000 + index)
    prior, vm, n = random_configuration(rnd)
    nA, nB = Allocation().split(n)
    plan = SimulationPlan(200_000, 500 + index)
    pairs = [
        (simulate_average_coverage(prior, vm, nA, nB, 0.6, plan), average_coverage(prior, vm, nA, nB, 0.6)),
        (simulate_average_length(prior, vm, nA, nB, 0.05, plan), average_length(prior, vm, nA, nB, 0.05)),
        (simulate_average_posterior_variance(prior, vm, nA, nB, plan), average_posterior_variance(prior, vm, nA, nB)),
    ]
    for est, exact in pairs:
        assert abs(est.value - exact) <= 4 * est.std_error


@pytest.mark.parametrize("config", [1, 2, 3, 4])
@pytest.mark.parametrize("weights", ["I", "II"])
def test_coverage_at_solved_size(config, weights):
    from commensurate_ssd.ssd import ACC, solve

    prior = build_collective_prior(sources_for(config, weights), HYPER, RULE)
    vm = UnknownVariance(3.0)
    res = solve(prior, ACC(0.65, 0.05), vm)
    est = simulate_average_coverage(prior, vm, res.nA, res.nB, 0.65, SimulationPlan(100_000, config * 10 + len(weights)))
    assert est.value >= 0.95 - 3 * est.std_error
