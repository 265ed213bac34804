"""Bidimensional discounted surplus process on a merged event grid.

The simulated object is the discounted surplus V_i(t) = e^{-rt} U_i(t):
discounting preserves the sign of the surplus (so every ruin event is
unchanged) and makes the diffusion increment over any interval exactly
Gaussian, so the only discretization left in the whole pipeline is
crossing detection between grid points.

Per interval (s, t]:

* linear premium contributes c * (e^{-rs} - e^{-rt}) / r  (c*(t-s) at r=0),
* the diffusion pair gains a joint Gaussian increment with common variance
  (e^{-2rs} - e^{-2rt}) / (2r)  (t-s at r=0) and correlation rho,
* a claim of size X arriving at time tau subtracts X * e^{-r tau} exactly,
  and a compound-Poisson premium jump J adds J * e^{-r tau}.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .distributions import ClaimDistribution

__all__ = [
    "ModelConfig",
    "DiscountedPath",
    "draw_arrivals",
    "discounted_diffusion_cov",
    "joint_diffusion_increment",
    "simulate_path",
    "refine_path",
]

PREMIUM_MODES = ("linear", "compound_poisson")


@dataclass(frozen=True)
class ModelConfig:
    """Full specification of the two-line surplus model.

    ``common_shock=True`` means both lines share one claim-arrival Poisson
    process with intensity ``lambda1`` (claim sizes stay independent across
    lines); dependence between the lines enters only through shared arrival
    times and the diffusion correlation ``rho``.
    """

    u1: float
    u2: float
    r: float
    rho: float
    sigma1: float
    sigma2: float
    lambda1: float
    lambda2: float
    dist1: ClaimDistribution
    dist2: ClaimDistribution
    T: float
    common_shock: bool = False
    c1: float = 0.0
    c2: float = 0.0
    premium_mode: str = "linear"
    premium_rate1: float = 0.0
    premium_rate2: float = 0.0
    premium_jump1: ClaimDistribution | None = None
    premium_jump2: ClaimDistribution | None = None
    h: float | None = None
    bridge: bool = True

    def __post_init__(self):
        if self.u1 < 0.0 or self.u2 < 0.0:
            raise ValueError("initial capital u1, u2 must be >= 0")
        if self.r < 0.0:
            raise ValueError("interest rate r must be >= 0")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        if self.sigma1 < 0.0 or self.sigma2 < 0.0:
            raise ValueError("volatilities sigma1, sigma2 must be >= 0")
        if self.lambda1 <= 0.0 or self.lambda2 <= 0.0:
            raise ValueError("claim intensities lambda1, lambda2 must be > 0")
        if self.c1 < 0.0 or self.c2 < 0.0:
            raise ValueError("premium rates c1, c2 must be >= 0")
        if self.T <= 0.0:
            raise ValueError("horizon T must be > 0")
        if self.premium_mode not in PREMIUM_MODES:
            raise ValueError(f"premium_mode must be one of {PREMIUM_MODES}")
        if self.premium_mode == "compound_poisson":
            if self.premium_rate1 <= 0.0 or self.premium_rate2 <= 0.0:
                raise ValueError("compound_poisson premiums need premium_rate1, premium_rate2 > 0")
            if self.premium_jump1 is None or self.premium_jump2 is None:
                raise ValueError("compound_poisson premiums need premium_jump1, premium_jump2")
        if self.h is None:
            object.__setattr__(self, "h", self.T / 1000.0)
        if not 0.0 < self.h <= self.T:
            raise ValueError("grid step h must satisfy 0 < h <= T")
        self._warn_if_loading_violated()

    def _warn_if_loading_violated(self):
        # Safety loading only matters for the undiscounted model; skipped
        # when the claim mean is infinite (e.g. Pareto alpha <= 1).
        if self.r > 0.0:
            return
        for i, (c, prate, pjump, dist) in enumerate(
            [
                (self.c1, self.premium_rate1, self.premium_jump1, self.dist1),
                (self.c2, self.premium_rate2, self.premium_jump2, self.dist2),
            ],
            start=1,
        ):
            claim_mean = dist.mean()
            if not math.isfinite(claim_mean):
                continue
            income = c
            if self.premium_mode == "compound_poisson" and pjump is not None:
                income += prate * pjump.mean()
            lam = self.arrival_rate(i)
            if income <= lam * claim_mean:
                warnings.warn(
                    f"safety loading violated for component {i}: premium income rate "
                    f"{income:g} <= expected claim outflow {lam * claim_mean:g}",
                    stacklevel=3,
                )

    def arrival_rate(self, component: int) -> float:
        """Effective claim intensity of a component (shared under common shock)."""
        if self.common_shock or component == 1:
            return self.lambda1
        return self.lambda2


@dataclass
class DiscountedPath:
    """One realized discounted path on the merged event grid.

    ``times[0] = 0`` and ``times[-1] = T``; the grid is the union of claim
    (and premium-jump) arrival times, the multiples of h, and T.  Values are
    carried both just before (``*_pre``) and just after (``*_post``) each
    instant; they differ only where a jump lands.
    """

    times: np.ndarray
    v1_pre: np.ndarray
    v1_post: np.ndarray
    v2_pre: np.ndarray
    v2_post: np.ndarray
    is_claim1: np.ndarray
    is_claim2: np.ndarray
    r: float
    rho: float
    sigma1: float
    sigma2: float
    c1: float = 0.0
    c2: float = 0.0

    @property
    def horizon(self) -> float:
        return float(self.times[-1])


def _interval_cov(r: float, s, t):
    """Var of the discounted-BM increment over (s, t]; allows s == t (-> 0)."""
    if r == 0.0:
        return np.asarray(t, dtype=float) - s
    return np.exp(-2.0 * r * np.asarray(s, dtype=float)) * (-np.expm1(-2.0 * r * (np.asarray(t) - s))) / (2.0 * r)


def _linear_drift(c: float, r: float, s, t):
    """Discounted linear-premium contribution c * int_s^t e^{-r l} dl."""
    if r == 0.0:
        return c * (np.asarray(t, dtype=float) - s)
    return c * np.exp(-r * np.asarray(s, dtype=float)) * (-np.expm1(-r * (np.asarray(t) - s))) / r


def discounted_diffusion_cov(r: float, s: float, t: float) -> float:
    """Variance of int_s^t e^{-r l} dB(l); exact branch at r = 0."""
    if r < 0.0:
        raise ValueError("r must be >= 0")
    if not 0.0 <= s < t:
        raise ValueError("need 0 <= s < t")
    return float(_interval_cov(r, s, t))


def joint_diffusion_increment(r: float, rho: float, s: float, t: float,
                              rng: np.random.Generator, size=None):
    """Jointly Gaussian discounted-diffusion increments over (s, t].

    Each margin has variance discounted_diffusion_cov(r, s, t) and the pair
    has correlation rho; built from two independent standard normals.
    """
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    v = discounted_diffusion_cov(r, s, t)
    sd = math.sqrt(v)
    z1 = rng.standard_normal(size)
    z2 = rng.standard_normal(size)
    d1 = sd * z1
    d2 = sd * (rho * z1 + math.sqrt(1.0 - rho * rho) * z2)
    return d1, d2


def draw_arrivals(rate: float, horizon: float, rng: np.random.Generator) -> np.ndarray:
    """Poisson arrival times on [0, horizon], via the conditional-uniform
    order-statistics representation: N ~ Poisson(rate*horizon), then N iid
    uniforms sorted."""
    if rate <= 0.0:
        raise ValueError("rate must be > 0")
    if horizon < 0.0:
        raise ValueError("horizon must be >= 0")
    n = rng.poisson(rate * horizon)
    return np.sort(horizon * rng.random(n))


def _grid_times(T: float, h: float) -> np.ndarray:
    m = int(np.floor(T / h + 1e-9))
    grid = h * np.arange(1, m + 1)
    return grid[grid < T]


def simulate_path(config: ModelConfig, rng: np.random.Generator) -> DiscountedPath:
    """Simulate one discounted path.

    Draw order (fixed, so one (config, seed) pair gives a bit-identical
    path): claim arrivals and sizes for line 1, then line 2 (one shared
    arrival draw under common shock), then compound-premium arrivals and
    jumps, then one (2, n_intervals) block of standard normals.
    """
    if config.common_shock:
        tau_c = draw_arrivals(config.lambda1, config.T, rng)
        x1 = np.asarray(config.dist1.sample(rng, tau_c.size), dtype=float)
        x2 = np.asarray(config.dist2.sample(rng, tau_c.size), dtype=float)
        tau1 = tau2 = tau_c
    else:
        tau1 = draw_arrivals(config.lambda1, config.T, rng)
        x1 = np.asarray(config.dist1.sample(rng, tau1.size), dtype=float)
        tau2 = draw_arrivals(config.lambda2, config.T, rng)
        x2 = np.asarray(config.dist2.sample(rng, tau2.size), dtype=float)

    if config.premium_mode == "compound_poisson":
        taup1 = draw_arrivals(config.premium_rate1, config.T, rng)
        j1 = np.asarray(config.premium_jump1.sample(rng, taup1.size), dtype=float)
        taup2 = draw_arrivals(config.premium_rate2, config.T, rng)
        j2 = np.asarray(config.premium_jump2.sample(rng, taup2.size), dtype=float)
    else:
        taup1 = taup2 = np.empty(0)
        j1 = j2 = np.empty(0)

    times = np.unique(
        np.concatenate([[0.0], _grid_times(config.T, config.h), [config.T], tau1, tau2, taup1, taup2])
    )
    n_iv = times.size - 1
    s, t = times[:-1], times[1:]

    w = _interval_cov(config.r, s, t)
    sd = np.sqrt(w)
    z = rng.standard_normal((2, n_iv))
    d1 = sd * z[0]
    d2 = sd * (config.rho * z[0] + math.sqrt(1.0 - config.rho**2) * z[1])

    cont1 = np.concatenate([[0.0], _linear_drift(config.c1, config.r, s, t) + config.sigma1 * d1])
    cont2 = np.concatenate([[0.0], _linear_drift(config.c2, config.r, s, t) + config.sigma2 * d2])

    jump1 = np.zeros_like(times)
    jump2 = np.zeros_like(times)
    is_claim1 = np.zeros(times.size, dtype=bool)
    is_claim2 = np.zeros(times.size, dtype=bool)
    disc = (lambda tau: np.exp(-config.r * tau)) if config.r > 0.0 else (lambda tau: 1.0)

    idx1 = np.searchsorted(times, tau1)
    np.add.at(jump1, idx1, -x1 * disc(tau1))
    is_claim1[idx1] = True
    idx2 = np.searchsorted(times, tau2)
    np.add.at(jump2, idx2, -x2 * disc(tau2))
    is_claim2[idx2] = True
    if taup1.size:
        np.add.at(jump1, np.searchsorted(times, taup1), j1 * disc(taup1))
    if taup2.size:
        np.add.at(jump2, np.searchsorted(times, taup2), j2 * disc(taup2))

    v1_post = config.u1 + np.cumsum(cont1 + jump1)
    v2_post = config.u2 + np.cumsum(cont2 + jump2)

    return DiscountedPath(
        times=times,
        v1_pre=v1_post - jump1,
        v1_post=v1_post,
        v2_pre=v2_post - jump2,
        v2_post=v2_post,
        is_claim1=is_claim1,
        is_claim2=is_claim2,
        r=config.r,
        rho=config.rho,
        sigma1=config.sigma1,
        sigma2=config.sigma2,
        c1=config.c1,
        c2=config.c2,
    )


def _bridge_martingale(m_left, m_right, w_a, w_b, z):
    """Conditional midpoint of a Gaussian martingale given its endpoints.

    w_a, w_b are the increment variances left/right of the midpoint; the
    conditional law is Normal(m_left + w_a/(w_a+w_b)*(m_right-m_left),
    w_a*w_b/(w_a+w_b)).
    """
    w_ab = w_a + w_b
    mean = m_left + (w_a / w_ab) * (m_right - m_left)
    return mean + np.sqrt(w_a * w_b / w_ab) * z


def refine_path(path: DiscountedPath, rng: np.random.Generator) -> DiscountedPath:
    """Insert the time-midpoint of every interval by exact bridge sampling.

    The refined grid contains the original instants with identical values,
    so (bridge-off) ruin detection on the refined path dominates detection
    on the original path, pathwise.  Between instants only the linear
    premium drift acts, so this is valid in compound-premium mode too.
    """
    times = path.times
    s, t = times[:-1], times[1:]
    mids = 0.5 * (s + t)
    r, rho = path.r, path.rho

    jump1 = path.v1_post - path.v1_pre
    jump2 = path.v2_post - path.v2_pre
    u1, u2 = path.v1_post[0], path.v2_post[0]

    drift1_cum = _linear_drift(path.c1, r, 0.0, times)
    drift2_cum = _linear_drift(path.c2, r, 0.0, times)
    cumjump1 = np.cumsum(jump1)
    cumjump2 = np.cumsum(jump2)

    # Martingale parts; decompose M2 = rho*M1 + sqrt(1-rho^2)*M_perp so the
    # two bridges can be sampled independently even though the pair is
    # correlated.
    m1 = (path.v1_post - u1 - drift1_cum - cumjump1) / path.sigma1 if path.sigma1 > 0 else np.zeros_like(times)
    m2 = (path.v2_post - u2 - drift2_cum - cumjump2) / path.sigma2 if path.sigma2 > 0 else np.zeros_like(times)
    ortho = math.sqrt(1.0 - rho * rho)
    m_perp = (m2 - rho * m1) / ortho if ortho > 0.0 else np.zeros_like(times)

    w_a = _interval_cov(r, s, mids)
    w_b = _interval_cov(r, mids, t)
    z = rng.standard_normal((2, mids.size))
    m1_mid = _bridge_martingale(m1[:-1], m1[1:], w_a, w_b, z[0])
    mp_mid = _bridge_martingale(m_perp[:-1], m_perp[1:], w_a, w_b, z[1])
    m2_mid = rho * m1_mid + ortho * mp_mid

    v1_mid = u1 + _linear_drift(path.c1, r, 0.0, mids) + cumjump1[:-1] + path.sigma1 * m1_mid
    v2_mid = u2 + _linear_drift(path.c2, r, 0.0, mids) + cumjump2[:-1] + path.sigma2 * m2_mid

    def interleave(orig, mid):
        out = np.empty(orig.size + mid.size, dtype=orig.dtype)
        out[::2] = orig
        out[1::2] = mid
        return out

    no_jump = np.zeros(mids.size, dtype=bool)
    return DiscountedPath(
        times=interleave(times, mids),
        v1_pre=interleave(path.v1_pre, v1_mid),
        v1_post=interleave(path.v1_post, v1_mid),
        v2_pre=interleave(path.v2_pre, v2_mid),
        v2_post=interleave(path.v2_post, v2_mid),
        is_claim1=interleave(path.is_claim1, no_jump),
        is_claim2=interleave(path.is_claim2, no_jump),
        r=r,
        rho=rho,
        sigma1=path.sigma1,
        sigma2=path.sigma2,
        c1=path.c1,
        c2=path.c2,
    )
