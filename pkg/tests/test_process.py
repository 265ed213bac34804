"""Tests for the discounted-path simulator and its building blocks."""

import math
import warnings

import numpy as np
import pytest
from scipy import integrate, stats

from biruin import (
    ModelConfig,
    Pareto,
    Weibull,
    discounted_diffusion_cov,
    draw_arrivals,
    joint_diffusion_increment,
    refine_path,
    simulate_path,
)

PARETO = Pareto(1.5, 1.0)


def make_config(**kw):
    base = dict(
        u1=10.0, u2=10.0, r=0.05, rho=-0.5, sigma1=0.2, sigma2=0.2,
        lambda1=1.0, lambda2=1.0, dist1=PARETO, dist2=PARETO, T=1.0,
        c1=3.3, c2=3.3, h=0.05,
    )
    base.update(kw)
    return ModelConfig(**base)


class TestDrawArrivals:
    def test_zero_horizon(self):
        assert draw_arrivals(2.0, 0.0, np.random.default_rng(0)).size == 0

    def test_sorted_and_in_range(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            t = draw_arrivals(5.0, 3.0, rng)
            assert np.all(np.diff(t) > 0)
            assert np.all((t > 0) & (t < 3.0))

    def test_mean_count(self):
        # lam=2, T=3: mean 6, exact Poisson sd sqrt(6/reps)
        rng = np.random.default_rng(2)
        reps = 10**5
        counts = [draw_arrivals(2.0, 3.0, rng).size for _ in range(reps)]
        se = math.sqrt(6.0 / reps)
        assert abs(np.mean(counts) - 6.0) < 3.0 * se

    def test_conditional_uniformity(self):
        # given the count, times/T are distributed as sorted uniforms
        rng = np.random.default_rng(3)
        pooled = np.concatenate([draw_arrivals(4.0, 2.0, rng) for _ in range(5000)])
        assert stats.kstest(pooled / 2.0, "uniform").pvalue > 0.01

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError, match="rate"):
            draw_arrivals(0.0, 1.0, np.random.default_rng(0))
        with pytest.raises(ValueError, match="horizon"):
            draw_arrivals(1.0, -1.0, np.random.default_rng(0))


class TestDiscountedDiffusionCov:
    def test_r_zero_is_elapsed_time(self):
        assert discounted_diffusion_cov(0.0, 0.0, 1.0) == 1.0
        assert discounted_diffusion_cov(0.0, 0.3, 0.8) == pytest.approx(0.5)

    def test_long_horizon_limit(self):
        assert discounted_diffusion_cov(0.5, 0.0, 1e9) == pytest.approx(1.0, rel=1e-12)

    def test_against_quadrature(self):
        # independent oracle: numeric integral of e^{-2 r l}
        r, s, t = 0.05, 0.2, 0.7
        oracle, _ = integrate.quad(lambda l: math.exp(-2.0 * r * l), s, t, epsabs=1e-14)
        assert discounted_diffusion_cov(r, s, t) == pytest.approx(oracle, rel=1e-12)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError, match="s < t"):
            discounted_diffusion_cov(0.1, 1.0, 1.0)
        with pytest.raises(ValueError, match=">= 0"):
            discounted_diffusion_cov(-0.1, 0.0, 1.0)


class TestJointDiffusionIncrement:
    def test_perfect_correlation_identical(self):
        d1, d2 = joint_diffusion_increment(0.05, 1.0, 0.0, 1.0, np.random.default_rng(0), size=100)
        np.testing.assert_array_equal(d1, d2)

    def test_zero_correlation(self):
        n = 10**6
        d1, d2 = joint_diffusion_increment(0.0, 0.0, 0.0, 1.0, np.random.default_rng(5), size=n)
        corr = float(np.corrcoef(d1, d2)[0, 1])
        assert abs(corr) < 3.0 / math.sqrt(n)

    def test_negative_covariance(self):
        n = 10**6
        rho, v = -0.5, discounted_diffusion_cov(0.1, 0.0, 1.0)
        d1, d2 = joint_diffusion_increment(0.1, rho, 0.0, 1.0, np.random.default_rng(6), size=n)
        cov = float(np.mean(d1 * d2))
        se = v * math.sqrt((1.0 + rho**2) / n)
        assert abs(cov - rho * v) < 3.0 * se

    def test_scalar_mode(self):
        d1, d2 = joint_diffusion_increment(0.0, 0.3, 0.0, 0.5, np.random.default_rng(1))
        assert np.ndim(d1) == 0 and np.ndim(d2) == 0


class TestModelConfig:
    def test_default_grid_step(self):
        cfg = make_config(h=None)
        assert cfg.h == pytest.approx(cfg.T / 1000.0)

    @pytest.mark.parametrize(
        "kw, match",
        [
            (dict(u1=-1.0), "capital"),
            (dict(r=-0.01), "interest"),
            (dict(rho=1.5), "rho"),
            (dict(sigma1=-0.1), "volatilities"),
            (dict(lambda1=0.0), "intensities"),
            (dict(c1=-1.0), "premium rates"),
            (dict(T=0.0), "horizon"),
            (dict(h=2.0), "grid step"),
            (dict(premium_mode="weird"), "premium_mode"),
        ],
    )
    def test_validation(self, kw, match):
        with pytest.raises(ValueError, match=match):
            make_config(**kw)

    def test_safety_loading_warning(self):
        with pytest.warns(UserWarning, match="safety loading"):
            make_config(r=0.0, c1=1.0)  # income 1 < lam * mean = 3

    def test_no_warning_with_loading(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            make_config(r=0.0, c1=3.3, c2=3.3)

    def test_no_warning_for_infinite_mean(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            make_config(r=0.0, c1=0.0, c2=0.0, dist1=Pareto(1.0, 1.0), dist2=Pareto(0.8, 1.0))

    def test_compound_premium_requirements(self):
        with pytest.raises(ValueError, match="premium_rate"):
            make_config(premium_mode="compound_poisson")


class TestSimulatePath:
    def test_deterministic_drift_never_negative(self):
        # no claims (tiny intensity), no diffusion: V1 strictly increases
        cfg = make_config(sigma1=0.0, sigma2=0.0, lambda1=1e-12, lambda2=1e-12, u1=1.0, c1=2.0)
        path = simulate_path(cfg, np.random.default_rng(0))
        assert path.is_claim1.sum() == 0
        assert np.all(np.diff(path.v1_post) > 0)
        assert np.all(path.v1_post >= 1.0)

    def test_forced_ruin_after_big_claim(self):
        # r=0, common shock, every claim >= 100 > u + c*T
        big = Pareto(1.0, 100.0)
        cfg = make_config(r=0.0, common_shock=True, lambda1=20.0, dist1=big, dist2=big,
                          u1=5.0, u2=5.0, c1=120.0, c2=120.0, sigma1=0.0, sigma2=0.0)
        path = simulate_path(cfg, np.random.default_rng(1))
        first = int(np.argmax(path.is_claim1))
        assert path.is_claim1[first]
        assert path.v1_post[first] < 0.0

    def test_terminal_mean(self):
        # no claims: E V1(T) = u1 + c1 (1 - e^{-rT})/r
        cfg = make_config(lambda1=1e-12, lambda2=1e-12, h=0.5)
        target = cfg.u1 + cfg.c1 * (1.0 - math.exp(-cfg.r * cfg.T)) / cfg.r
        rng = np.random.default_rng(7)
        vals = np.array([simulate_path(cfg, rng).v1_post[-1] for _ in range(30_000)])
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - target) < 3.0 * se

    def test_bit_identical_for_same_seed(self):
        cfg = make_config()
        p1 = simulate_path(cfg, np.random.default_rng(11))
        p2 = simulate_path(cfg, np.random.default_rng(11))
        np.testing.assert_array_equal(p1.times, p2.times)
        np.testing.assert_array_equal(p1.v1_post, p2.v1_post)
        np.testing.assert_array_equal(p1.v2_pre, p2.v2_pre)

    def test_grid_contents(self):
        cfg = make_config(h=0.1)
        path = simulate_path(cfg, np.random.default_rng(13))
        assert path.times[0] == 0.0
        assert path.times[-1] == cfg.T
        assert np.all(np.diff(path.times) > 0)
        for m in range(1, 10):
            assert np.any(path.times == m * 0.1)
        claim_times = path.times[path.is_claim1]
        assert claim_times.size > 0 or True  # claims may be absent on a short path

    @pytest.mark.filterwarnings("ignore:safety loading")
    def test_claims_hit_exactly(self):
        cfg = make_config(r=0.0, sigma1=0.0, sigma2=0.0, c1=0.0, c2=0.0,
                          lambda1=5.0, lambda2=5.0, u1=1e9, u2=1e9)
        path = simulate_path(cfg, np.random.default_rng(17))
        # with no drift and no diffusion the only changes are the claims
        drop1 = path.v1_post - path.v1_pre
        assert np.all(drop1[path.is_claim1] < 0.0)
        assert np.all(drop1[~path.is_claim1] == 0.0)

    def test_perfect_correlation_same_diffusion(self):
        cfg = make_config(rho=1.0, u1=5.0, u2=5.0, c1=0.0, c2=0.0,
                          lambda1=1e-12, lambda2=1e-12, common_shock=True)
        path = simulate_path(cfg, np.random.default_rng(19))
        np.testing.assert_array_equal(path.v1_post, path.v2_post)

    def test_common_shock_shared_arrivals(self):
        cfg = make_config(common_shock=True, lambda1=8.0)
        path = simulate_path(cfg, np.random.default_rng(23))
        np.testing.assert_array_equal(path.is_claim1, path.is_claim2)

    def test_terminal_variance_and_sum_reduction(self):
        # one-interval paths isolate sigma_i * D_i(T); checks both the
        # marginal variance and the variance of the correlated sum
        cfg = make_config(lambda1=1e-12, lambda2=1e-12, c1=0.0, c2=0.0, h=1.0, u1=0.0, u2=0.0)
        rng = np.random.default_rng(29)
        n = 10**5
        vals = np.empty((2, n))
        for i in range(n):
            p = simulate_path(cfg, rng)
            vals[0, i] = p.v1_post[-1]
            vals[1, i] = p.v2_post[-1]
        v = (1.0 - math.exp(-2.0 * cfg.r * cfg.T)) / (2.0 * cfg.r)
        for data, theory in [
            (vals[0], cfg.sigma1**2 * v),
            (vals[0] + vals[1], (cfg.sigma1**2 + cfg.sigma2**2 + 2 * cfg.rho * cfg.sigma1 * cfg.sigma2) * v),
        ]:
            sample = data.var(ddof=1)
            se = theory * math.sqrt(2.0 / (n - 1))
            assert abs(sample - theory) < 3.0 * se

    def test_compound_premium_jumps_up(self):
        cfg = make_config(premium_mode="compound_poisson", premium_rate1=5.0, premium_rate2=5.0,
                          premium_jump1=Weibull(0.5, 1.0), premium_jump2=Weibull(0.5, 1.0),
                          c1=0.0, c2=0.0, sigma1=0.0, sigma2=0.0,
                          lambda1=1e-12, lambda2=1e-12, u1=1.0, u2=1.0)
        path = simulate_path(cfg, np.random.default_rng(31))
        assert np.all(np.diff(path.v1_post) >= 0.0)
        assert path.v1_post[-1] > 1.0


class TestRefinePath:
    def test_original_instants_preserved(self):
        cfg = make_config()
        path = simulate_path(cfg, np.random.default_rng(37))
        fine = refine_path(path, np.random.default_rng(38))
        assert fine.times.size == 2 * path.times.size - 1
        np.testing.assert_array_equal(fine.times[::2], path.times)
        np.testing.assert_array_equal(fine.v1_pre[::2], path.v1_pre)
        np.testing.assert_array_equal(fine.v2_post[::2], path.v2_post)
        np.testing.assert_array_equal(fine.is_claim1[::2], path.is_claim1)
        assert not fine.is_claim1[1::2].any()

    @pytest.mark.filterwarnings("ignore:safety loading")
    def test_midpoint_distribution(self):
        # one interval, r=0: midpoint of a sigma-BM bridge has variance
        # sigma^2 * dt/4 around the endpoint average
        cfg = make_config(r=0.0, lambda1=1e-12, lambda2=1e-12, c1=0.0, c2=0.0,
                          h=1.0, u1=0.0, u2=0.0, sigma1=1.0, sigma2=1.0, rho=0.3)
        rng = np.random.default_rng(41)
        n = 40_000
        mids = np.empty(n)
        for i in range(n):
            p = simulate_path(cfg, rng)
            f = refine_path(p, rng)
            mids[i] = f.v1_post[1] - 0.5 * (p.v1_post[0] + p.v1_post[1])
        theory = 0.25
        se = theory * math.sqrt(2.0 / (n - 1))
        assert abs(mids.var(ddof=1) - theory) < 3.0 * se
        assert abs(mids.mean()) < 3.0 * math.sqrt(theory / n)
