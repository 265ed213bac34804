"""Tests for the parametric claim-size distributions."""

import math

import numpy as np
import pytest
from scipy import stats

from biruin import Exponential, Lognormal, Pareto, Weibull, mixture_tail

ALL_DISTS = [
    Pareto(1.5, 1.0),
    Pareto(0.8, 2.0),
    Weibull(0.5, 1.0),
    Weibull(0.3, 2.5),
    Lognormal(0.0, 1.0),
    Lognormal(1.0, 0.5),
    Exponential(1.0),
    Exponential(0.25),
]


@pytest.fixture
def rng():
    return np.random.default_rng(42)


class TestTail:
    def test_pareto_exact_values(self):
        assert Pareto(1.0, 1.0).tail(2.0) == 0.5
        assert Pareto(2.0, 1.0).tail(0.5) == 1.0  # below the support minimum

    def test_weibull_exact_value(self):
        assert Weibull(0.5, 1.0).tail(4.0) == pytest.approx(math.exp(-2.0), rel=1e-14)

    def test_exponential_exact_value(self):
        assert Exponential(2.0).tail(1.0) == pytest.approx(math.exp(-2.0), rel=1e-14)

    @pytest.mark.parametrize("dist", ALL_DISTS, ids=str)
    def test_range_and_below_support(self, dist):
        xs = np.concatenate([[-1.0, 0.0], np.geomspace(1e-6, 1e6, 50)])
        t = dist.tail(xs)
        assert np.all((0.0 <= t) & (t <= 1.0))
        assert dist.tail(-3.0) == 1.0

    @pytest.mark.parametrize("dist", ALL_DISTS, ids=str)
    def test_monotone_nonincreasing(self, dist, rng):
        xs = np.sort(rng.uniform(0.0, 50.0, size=200))
        t = dist.tail(xs)
        assert np.all(np.diff(t) <= 1e-15)


class TestQuantile:
    def test_exact_values(self):
        assert Pareto(1.0, 1.0).quantile(0.5) == pytest.approx(2.0, rel=1e-14)
        assert Exponential(1.0).quantile(1.0 - math.exp(-1.0)) == pytest.approx(1.0, rel=1e-12)
        assert Lognormal(0.0, 1.0).quantile(0.5) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("dist", ALL_DISTS, ids=str)
    def test_inverse_consistency(self, dist):
        # |tail(quantile(p)) - (1-p)| small across the bulk of the support
        p = np.linspace(0.001, 0.999, 200)
        err = np.abs(dist.tail(dist.quantile(p)) - (1.0 - p))
        assert err.max() <= 1e-10

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.3])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError, match="open interval"):
            Pareto(1.0, 1.0).quantile(bad)


class TestSample:
    def test_deterministic_from_stream_state(self):
        d = Lognormal(0.0, 1.0)
        a = d.sample(np.random.default_rng(7))
        b = d.sample(np.random.default_rng(7))
        assert a == b

    def test_one_uniform_per_draw(self):
        # inverse-CDF sampling: the draw equals quantile(U) for the stream's U
        d = Pareto(1.5, 1.0)
        u = np.random.default_rng(3).random(5)
        got = d.sample(np.random.default_rng(3), 5)
        np.testing.assert_allclose(got, d._quantile(u), rtol=0)

    def test_pareto_sample_mean(self):
        # analytic mean alpha*xm/(alpha-1) = 2 for Pareto(2, 1)
        x = Pareto(2.0, 1.0).sample(np.random.default_rng(123), 10**6)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert abs(x.mean() - 2.0) < 3.0 * se

    def test_weibull_empirical_tail(self):
        x = Weibull(0.5, 1.0).sample(np.random.default_rng(99), 10**6)
        p = math.exp(-2.0)
        p_hat = float((x > 4.0).mean())
        se = math.sqrt(p * (1 - p) / x.size)
        assert abs(p_hat - p) < 3.0 * se

    @pytest.mark.parametrize("dist", ALL_DISTS, ids=str)
    def test_kolmogorov_smirnov(self, dist):
        x = dist.sample(np.random.default_rng(2024), 10**5)
        d_stat = stats.kstest(x, lambda v: 1.0 - dist.tail(v)).statistic
        assert d_stat < 1.6276 / math.sqrt(x.size)  # 1% critical value

    def test_nonnegative(self, rng):
        for dist in ALL_DISTS:
            assert np.all(dist.sample(rng, 1000) >= 0.0)


class TestMixtureTail:
    def test_equal_rates_average(self):
        d1, d2 = Pareto(1.0, 1.0), Pareto(2.0, 1.0)
        x = 5.0  # tails 0.2 and 0.04
        assert mixture_tail(d1, d2, 3.0, 3.0, x) == pytest.approx(0.12, rel=1e-12)

    def test_degenerate_weight(self):
        d1, d2 = Pareto(1.0, 1.0), Exponential(1.0)
        got = mixture_tail(d1, d2, 1.0, 1e-12, 10.0)
        assert got == pytest.approx(d1.tail(10.0), rel=1e-10)

    def test_weighted_average(self):
        # lam1=1, lam2=3, tails 0.4 and 0.0 at x -> 0.1
        d1 = Pareto(1.0, 4.0)  # tail(10) = 0.4
        d2 = Pareto(5.0, 1e-6)  # tail(10) ~ 1e-35
        assert mixture_tail(d1, d2, 1.0, 3.0, 10.0) == pytest.approx(0.1, abs=1e-12)

    def test_between_component_tails(self, rng):
        d1, d2 = Pareto(1.2, 1.0), Weibull(0.4, 2.0)
        for x in rng.uniform(0.1, 30.0, size=50):
            m = mixture_tail(d1, d2, 0.7, 2.1, x)
            lo, hi = sorted((d1.tail(x), d2.tail(x)))
            assert lo - 1e-15 <= m <= hi + 1e-15
            assert 0.0 <= m <= 1.0

    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValueError, match="rates"):
            mixture_tail(Pareto(1.0, 1.0), Pareto(1.0, 1.0), 0.0, 1.0, 2.0)


class TestValidationAndTags:
    def test_parameter_validation(self):
        with pytest.raises(ValueError, match="alpha"):
            Pareto(0.0, 1.0)
        with pytest.raises(ValueError, match="xm"):
            Pareto(1.0, -1.0)
        with pytest.raises(ValueError, match="shape"):
            Weibull(1.0, 1.0)
        with pytest.raises(ValueError, match="scale"):
            Weibull(0.5, 0.0)
        with pytest.raises(ValueError, match="s must"):
            Lognormal(0.0, 0.0)
        with pytest.raises(ValueError, match="rate"):
            Exponential(-2.0)

    def test_class_tags(self):
        assert Pareto(1.5, 1.0).class_tag == "subexponential"
        assert Weibull(0.5, 1.0).class_tag == "subexponential"
        assert Lognormal(0.0, 1.0).class_tag == "subexponential"
        assert Exponential(1.0).class_tag == "light"

    def test_means(self):
        assert Pareto(2.0, 1.0).mean() == pytest.approx(2.0)
        assert math.isinf(Pareto(1.0, 1.0).mean())
        assert Exponential(4.0).mean() == pytest.approx(0.25)
        assert Lognormal(0.0, 1.0).mean() == pytest.approx(math.exp(0.5))
        # Weibull mean scale*Gamma(1 + 1/k); k=0.5 -> 2! = 2
        assert Weibull(0.5, 3.0).mean() == pytest.approx(6.0)
