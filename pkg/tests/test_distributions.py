import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commensurate_ssd.distributions import (
    DEFAULT_QUADRATURE,
    GammaParams,
    InvGammaParams,
    LocationScaleT,
    NormalParams,
    QuadratureSpec,
    gamma_summary,
    integrate,
    invgamma_mean,
    normal_cdf,
    normal_quantile,
    standard_normal_upper,
    t_pdf,
)
from commensurate_ssd.errors import DomainError, QuadratureError, UndefinedMomentError


class TestNormal:
    def test_cdf_reference_points(self):
        assert normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
        assert normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-7)
        assert normal_cdf(-0.309, NormalParams(-0.309, 0.154)) == pytest.approx(0.5, abs=1e-15)

    def test_quantile_reference_points(self):
        assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
        assert normal_quantile(0.5, NormalParams(3.0, 4.0)) == pytest.approx(3.0, abs=1e-12)
        assert normal_quantile(0.95) == pytest.approx(1.644854, abs=1e-6)
        assert standard_normal_upper(0.025) == pytest.approx(1.959964, abs=1e-6)

    @given(q=st.floats(1e-10, 1 - 1e-10), mean=st.floats(-5, 5), var=st.floats(0.01, 10))
    def test_quantile_cdf_round_trip(self, q, mean, var):
        p = NormalParams(mean, var)
        assert float(p.cdf(p.quantile(q))) == pytest.approx(q, rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_rejects_boundary(self, q):
        with pytest.raises(DomainError):
            normal_quantile(q)

    def test_variance_must_be_positive(self):
        with pytest.raises(DomainError):
            NormalParams(0.0, 0.0)


class TestGamma:
    @pytest.mark.parametrize(
        "shape, rate, expected",
        [(2.0, 2.0, (1.000, 0.121, 2.786)), (18.0, 3.0, (6.000, 3.556, 9.073))],
    )
    def test_summaries(self, shape, rate, expected):
        got = gamma_summary(GammaParams(shape, rate))
        assert got == pytest.approx(expected, abs=1e-3)

    def test_exponential_special_case(self):
        mean, _, q975 = gamma_summary(GammaParams(1.0, 1.0))
        assert mean == 1.0
        assert q975 == pytest.approx(-math.log(0.025), abs=1e-10)

    @given(shape=st.floats(0.2, 50), rate=st.floats(0.1, 20), q=st.floats(1e-6, 1 - 1e-6))
    def test_round_trip(self, shape, rate, q):
        g = GammaParams(shape, rate)
        assert float(g.cdf(g.quantile(q))) == pytest.approx(q, rel=1e-8, abs=1e-12)

    def test_pdf_integrates_to_one(self):
        g = GammaParams(2.5, 0.7)
        total, _ = integrate(lambda x: float(g.pdf(x)), 0.0, math.inf)
        assert total == pytest.approx(1.0, abs=1e-9)


class TestInvGamma:
    def test_means(self):
        assert invgamma_mean(InvGammaParams(2.5, 0.385)) == pytest.approx(0.25667, abs=1e-5)
        assert invgamma_mean(InvGammaParams(1.5, 1.5 * 0.295)) == pytest.approx(0.885, abs=1e-9)

    def test_mean_undefined_at_shape_one(self):
        with pytest.raises(UndefinedMomentError, match="shape"):
            invgamma_mean(InvGammaParams(1.0, 1.0))

    def test_mean_by_quadrature(self):
        ig = InvGammaParams(2.5, 0.385)
        val, _ = integrate(lambda s: s * float(ig.pdf(s)), 0.0, math.inf)
        assert val == pytest.approx(invgamma_mean(ig), rel=1e-8)

    def test_cdf_matches_reciprocal_gamma(self):
        ig = InvGammaParams(2.5, 0.385)
        g = GammaParams(2.5, 0.385)
        for x in (0.05, 0.2, 1.0, 4.0):
            assert float(ig.cdf(x)) == pytest.approx(1.0 - float(g.cdf(1.0 / x)), abs=1e-14)

    @given(q=st.floats(1e-6, 1 - 1e-6))
    def test_round_trip(self, q):
        ig = InvGammaParams(1.5, 0.44)
        assert float(ig.cdf(ig.quantile(q))) == pytest.approx(q, rel=1e-8)


class TestLocationScaleT:
    def test_mode_density(self):
        t = LocationScaleT(4.0, 0.3, 1.7)
        expected = math.gamma(2.5) / (math.gamma(2.0) * 1.7 * math.sqrt(4.0 * math.pi))
        assert t_pdf(0.3, t) == pytest.approx(expected, rel=1e-13)

    def test_normal_limit(self):
        assert t_pdf(0.0, LocationScaleT(1000.0, 0.0, 1.0)) == pytest.approx(
            1.0 / math.sqrt(2.0 * math.pi), abs=1e-3
        )

    @pytest.mark.parametrize("df", [1.0, 4.0, 36.0])
    def test_integrates_to_one(self, df):
        t = LocationScaleT(df, -0.26, 0.8)
        lo, _ = integrate(lambda x: t_pdf(x, t), -math.inf, t.location)
        hi, _ = integrate(lambda x: t_pdf(x, t), t.location, math.inf)
        assert lo + hi == pytest.approx(1.0, abs=1e-8)

    def test_variance_needs_df_above_two(self):
        assert LocationScaleT(4.0, 0.0, 1.0).variance() == pytest.approx(2.0)
        with pytest.raises(UndefinedMomentError):
            LocationScaleT(2.0, 0.0, 1.0).variance()


class TestIntegrate:
    def test_exponential(self):
        val, err = integrate(lambda x: math.exp(-x), 0.0, math.inf)
        assert val == pytest.approx(1.0, abs=1e-12)
        assert err >= 0.0

    def test_normal_density(self):
        n = NormalParams(0.0, 1.0)
        val, _ = integrate(lambda x: float(n.pdf(x)), -math.inf, math.inf)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_divergent_integral_raises(self):
        with pytest.raises(QuadratureError) as info:
            integrate(lambda x: 1.0 / x, 0.0, 1.0, QuadratureSpec(1e-12, 1e-12, 20))
        assert info.value.error_estimate is not None

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            QuadratureSpec(-1.0, 1e-9, 50)
        assert DEFAULT_QUADRATURE.max_subdivisions >= 50
