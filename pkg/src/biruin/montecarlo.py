"""Batched, reproducible Monte Carlo estimation of the four ruin probabilities.

The estimator simulates whole batches of discounted paths at once with
numpy (cross-path vectorization), folding ruin detection into the stepping
loop so no per-path objects are materialized.  Semantics are identical to
``simulate_path`` + ``detect``: same merged event grid, exact Gaussian
increments, bridge crossing corrections with one shared uniform per
interval, grid-only detection for simultaneous ruin.

Reproducibility contract: paths are split into fixed-size batches; batch b
draws from the stream keyed by ``substream_key(seed, b)`` and batch results
are merged in batch-index order, so the outcome depends only on
``(config, n_paths, seed, batch_size)`` — never on worker count or
scheduling.  Estimates carry Wilson score intervals, which stay informative
at p_hat = 0 where the Wald interval degenerates.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .asymptotics import (
    AsymptoticResult,
    psi_and_upper,
    psi_max_asym,
    psi_min_asym,
    psi_sum_asym,
    psi_uni_asym,
)
from .process import ModelConfig
from .streams import substream

__all__ = [
    "RUIN_TYPES",
    "PROBE_MODES",
    "Estimate",
    "EstimateSet",
    "StudyRow",
    "DependenceProbe",
    "SumReductionProbe",
    "wilson_interval",
    "estimate_ruin",
    "convergence_study",
    "dependence_probe",
    "dependence_probe_grid",
    "sum_reduction_probe",
]

RUIN_TYPES = ("max", "min", "sum", "and", "comp1", "comp2")
PROBE_MODES = ("sup", "inf", "discounted_sup", "discounted_inf")

DEFAULT_BATCH_SIZE = 2**14
_PROBE_CHUNK = 1024

_Z95 = 1.959963984540054


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class Estimate:
    """A ruin-probability point estimate with its 95% Wilson interval."""

    p_hat: float
    ci_lo: float
    ci_hi: float
    n: int

    @classmethod
    def from_counts(cls, successes: int, n: int) -> "Estimate":
        lo, hi = wilson_interval(successes, n)
        return cls(p_hat=successes / n, ci_lo=lo, ci_hi=hi, n=n)


@dataclass(frozen=True)
class EstimateSet:
    """Estimates for all six ruin types from one set of paths.

    Counts are exact integers from the same paths, so the pathwise
    identities hold exactly: counts["min"] + counts["and"] ==
    counts["comp1"] + counts["comp2"], and max <= and <= min, sum <= min.
    """

    n: int
    counts: dict[str, int]

    def __getitem__(self, ruin_type: str) -> Estimate:
        return Estimate.from_counts(self.counts[ruin_type], self.n)

    @property
    def estimates(self) -> dict[str, Estimate]:
        return {t: self[t] for t in RUIN_TYPES}


@dataclass(frozen=True)
class StudyRow:
    """One (capital, ruin type) cell of a convergence study."""

    u1: float
    u2: float
    ruin_type: str
    n: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    asym: float
    ratio: float


@dataclass(frozen=True)
class DependenceProbe:
    """Joint and marginal exceedance estimates for one correlation value."""

    joint: Estimate
    marg1: Estimate
    marg2: Estimate


@dataclass(frozen=True)
class SumReductionProbe:
    sample_var: float
    theory_var: float
    z_score: float


# ---------------------------------------------------------------------------
# batch kernel


def _padded_arrivals(rate: float, config: ModelConfig, n: int, rng: np.random.Generator):
    """Sorted arrival-time matrix padded with +inf (one spare column so the
    per-path cursor can always be gathered safely)."""
    counts = rng.poisson(rate * config.T, n)
    kmax = int(counts.max()) if n else 0
    raw = config.T * rng.random((n, kmax))
    times = np.sort(np.where(np.arange(kmax) < counts[:, None], raw, np.inf), axis=1)
    return np.concatenate([times, np.full((n, 1), np.inf)], axis=1)


def _padded_amounts(dist, shape, rng: np.random.Generator):
    amounts = np.asarray(dist.sample(rng, shape), dtype=float).reshape(shape)
    return np.concatenate([amounts, np.zeros((shape[0], 1))], axis=1)


def _simulate_batch_counts(config: ModelConfig, rng: np.random.Generator, n: int) -> dict[str, int]:
    """Simulate n paths and return exact ruin counts for all six events.

    Draw order per batch: arrival counts and times, claim amounts (line 1
    then line 2), compound-premium arrivals/jumps, then per event step one
    (2, n) block of normals and (bridge on) one (n,) block of uniforms.
    """
    T, r, h = config.T, config.r, config.h
    s1, s2, rho = config.sigma1, config.sigma2, config.rho
    orth = math.sqrt(1.0 - rho * rho)
    sig_sum_sq = max(s1 * s1 + s2 * s2 + 2.0 * rho * s1 * s2, 0.0)
    bridge = config.bridge

    if config.common_shock:
        ct1 = ct2 = _padded_arrivals(config.lambda1, config, n, rng)
        kshape = (n, ct1.shape[1] - 1)
        cx1 = _padded_amounts(config.dist1, kshape, rng)
        cx2 = _padded_amounts(config.dist2, kshape, rng)
    else:
        ct1 = _padded_arrivals(config.lambda1, config, n, rng)
        cx1 = _padded_amounts(config.dist1, (n, ct1.shape[1] - 1), rng)
        ct2 = _padded_arrivals(config.lambda2, config, n, rng)
        cx2 = _padded_amounts(config.dist2, (n, ct2.shape[1] - 1), rng)

    compound = config.premium_mode == "compound_poisson"
    if compound:
        pt1 = _padded_arrivals(config.premium_rate1, config, n, rng)
        pj1 = _padded_amounts(config.premium_jump1, (n, pt1.shape[1] - 1), rng)
        pt2 = _padded_arrivals(config.premium_rate2, config, n, rng)
        pj2 = _padded_amounts(config.premium_jump2, (n, pt2.shape[1] - 1), rng)

    rows = np.arange(n)
    t_cur = np.zeros(n)
    v1 = np.full(n, float(config.u1))
    v2 = np.full(n, float(config.u2))
    ic1 = np.zeros(n, dtype=np.int64)
    ic2 = np.zeros(n, dtype=np.int64)
    ip1 = np.zeros(n, dtype=np.int64)
    ip2 = np.zeros(n, dtype=np.int64)
    m_grid = np.zeros(n, dtype=np.int64)
    r1 = np.zeros(n, dtype=bool)
    r2 = np.zeros(n, dtype=bool)
    rmax = np.zeros(n, dtype=bool)
    rsum = np.zeros(n, dtype=bool)

    while True:
        active = t_cur < T
        if not active.any():
            break

        grid_next = np.minimum((m_grid + 1) * h, T)
        nc1 = ct1[rows, ic1]
        nc2 = nc1 if config.common_shock else ct2[rows, ic2]
        t_next = np.minimum(grid_next, np.minimum(nc1, nc2))
        if compound:
            np1 = pt1[rows, ip1]
            np2 = pt2[rows, ip2]
            t_next = np.minimum(t_next, np.minimum(np1, np2))
        t_next = np.where(active, t_next, t_cur)

        if r == 0.0:
            dt = t_next - t_cur
            w = dt
            drift1 = config.c1 * dt
            drift2 = config.c2 * dt
            disc = 1.0
        else:
            es = np.exp(-r * t_cur)
            et = np.exp(-r * t_next)
            diff = np.maximum(es - et, 0.0)
            w = diff * (es + et) / (2.0 * r)
            drift1 = config.c1 * diff / r
            drift2 = config.c2 * diff / r
            disc = et

        z = rng.standard_normal((2, n))
        sd = np.sqrt(w)
        v1_pre = v1 + drift1 + s1 * (sd * z[0])
        v2_pre = v2 + drift2 + s2 * (sd * (rho * z[0] + orth * z[1]))
        vs_left = v1 + v2
        vs_pre = v1_pre + v2_pre

        if bridge:
            u = rng.random(n)
            cross1 = u < _crossing_prob_arr(v1, v1_pre, s1 * s1 * w)
            cross2 = u < _crossing_prob_arr(v2, v2_pre, s2 * s2 * w)
            # The shared uniform makes a sum crossing imply a component
            # crossing (p_sum <= max(p1, p2)); the conjunction only pins
            # that implication against float rounding.
            cross_sum = (u < _crossing_prob_arr(vs_left, vs_pre, sig_sum_sq * w)) & (cross1 | cross2)
            r1 |= active & cross1
            r2 |= active & cross2
            rsum |= active & cross_sum

        neg1_pre = v1_pre < 0.0
        neg2_pre = v2_pre < 0.0
        r1 |= active & neg1_pre
        r2 |= active & neg2_pre
        rsum |= active & (vs_pre < 0.0)
        rmax |= active & neg1_pre & neg2_pre

        fire1 = active & (t_next == nc1)
        fire2 = fire1 if config.common_shock else (active & (t_next == nc2))
        v1_post = v1_pre - np.where(fire1, cx1[rows, ic1] * disc, 0.0)
        v2_post = v2_pre - np.where(fire2, cx2[rows, ic1 if config.common_shock else ic2] * disc, 0.0)
        ic1 += fire1
        if not config.common_shock:
            ic2 += fire2
        if compound:
            firep1 = active & (t_next == np1)
            firep2 = active & (t_next == np2)
            v1_post = v1_post + np.where(firep1, pj1[rows, ip1] * disc, 0.0)
            v2_post = v2_post + np.where(firep2, pj2[rows, ip2] * disc, 0.0)
            ip1 += firep1
            ip2 += firep2

        neg1_post = v1_post < 0.0
        neg2_post = v2_post < 0.0
        r1 |= active & neg1_post
        r2 |= active & neg2_post
        rsum |= active & ((v1_post + v2_post) < 0.0)
        rmax |= active & neg1_post & neg2_post

        m_grid += active & (t_next == grid_next)
        v1 = np.where(active, v1_post, v1)
        v2 = np.where(active, v2_post, v2)
        t_cur = t_next

    return {
        "max": int(rmax.sum()),
        "min": int((r1 | r2).sum()),
        "sum": int(rsum.sum()),
        "and": int((r1 & r2).sum()),
        "comp1": int(r1.sum()),
        "comp2": int(r2.sum()),
    }


def _crossing_prob_arr(a, b, v):
    """Bridge crossing probability over one interval, 0 where there is no
    diffusion, 1 where an endpoint is already non-positive."""
    hit = (a <= 0.0) | (b <= 0.0)
    safe_v = np.where(v > 0.0, v, 1.0)
    p = np.where(v > 0.0, np.exp(-2.0 * np.abs(a * b) / safe_v), 0.0)
    return np.where(hit, 1.0, p)


def _batch_task(args) -> dict[str, int]:
    config, seed, batch_index, size = args
    return _simulate_batch_counts(config, substream(seed, batch_index), size)


def estimate_ruin(
    config: ModelConfig,
    n_paths: int,
    seed: int,
    workers: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> EstimateSet:
    """Estimate all six ruin probabilities from n_paths simulated paths.

    The result is bit-identical for any ``workers`` value; see the module
    docstring for the stream contract.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    sizes = [batch_size] * (n_paths // batch_size)
    if n_paths % batch_size:
        sizes.append(n_paths % batch_size)
    tasks = [(config, seed, b, size) for b, size in enumerate(sizes)]

    if workers == 1 or len(tasks) == 1:
        results = [_batch_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_batch_task, tasks))

    counts = {t: 0 for t in RUIN_TYPES}
    for res in results:
        for t in RUIN_TYPES:
            counts[t] += res[t]
    return EstimateSet(n=n_paths, counts=counts)


# ---------------------------------------------------------------------------
# convergence studies


def _asym_for(config: ModelConfig, ruin_type: str, u1: float, u2: float) -> AsymptoticResult:
    if ruin_type == "max":
        return psi_max_asym(config, u1, u2)
    if ruin_type == "min":
        return psi_min_asym(config, u1, u2)
    if ruin_type == "sum":
        return psi_sum_asym(config, u1, u2)
    if ruin_type == "and":
        return psi_and_upper(config, u1, u2)
    if ruin_type == "comp1":
        return psi_uni_asym(config.arrival_rate(1), config.dist1, u1, config.r, config.T)
    if ruin_type == "comp2":
        return psi_uni_asym(config.arrival_rate(2), config.dist2, u2, config.r, config.T)
    raise ValueError(f"unknown ruin type {ruin_type!r}")


def convergence_study(
    config: ModelConfig,
    u_grid: list[tuple[float, float]],
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> list[StudyRow]:
    """Monte Carlo vs asymptotic-formula table over a capital grid.

    One row per (capital pair, ruin type); the "and" rows pair the estimate
    with the order upper bound (no exact asymptotic exists for that event).
    """
    if not u_grid:
        raise ValueError("u_grid must be nonempty")
    sums = [u1 + u2 for u1, u2 in u_grid]
    if any(b <= a for a, b in zip(sums, sums[1:])):
        raise ValueError("u_grid must be increasing")
    rows = []
    for u1, u2 in u_grid:
        cfg = replace(config, u1=float(u1), u2=float(u2))
        est = estimate_ruin(cfg, n_paths, seed, workers=workers)
        for ruin_type in RUIN_TYPES:
            asym = _asym_for(cfg, ruin_type, u1, u2).value
            e = est[ruin_type]
            rows.append(
                StudyRow(
                    u1=float(u1),
                    u2=float(u2),
                    ruin_type=ruin_type,
                    n=est.n,
                    p_hat=e.p_hat,
                    ci_lo=e.ci_lo,
                    ci_hi=e.ci_hi,
                    asym=asym,
                    ratio=e.p_hat / asym if asym > 0.0 else math.nan,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# dependence probes (quadrant-dependence inequalities for path extrema)


def _probe_step_scales(mode: str, r: float, t: float, steps: int) -> np.ndarray:
    """Per-step standard deviations of the (possibly discounted) increments."""
    edges = t * np.arange(steps + 1) / steps
    if mode.startswith("discounted"):
        w = np.exp(-2.0 * r * edges[:-1]) * (-np.expm1(-2.0 * r * np.diff(edges))) / (2.0 * r)
    else:
        w = np.diff(edges)
    return np.sqrt(w).astype(np.float32)


def _probe_chunk_task(args) -> np.ndarray:
    (rhos, x1, x2, seed, chunk_index, chunk_n, scales, want_inf) = args
    rng = substream(seed, chunk_index)
    steps = scales.size
    z1 = rng.standard_normal((chunk_n, steps), dtype=np.float32)
    z2 = rng.standard_normal((chunk_n, steps), dtype=np.float32)
    z1 *= scales
    z2 *= scales
    path1 = np.cumsum(z1, axis=1, out=z1)
    path_perp = np.cumsum(z2, axis=1, out=z2)
    if want_inf:
        ext1 = path1.min(axis=1)
        flag1 = ext1 < -x1
    else:
        ext1 = path1.max(axis=1)
        flag1 = ext1 > x1
    # counts[i] = [joint, marg1, marg2] for rhos[i]; marg1 is rho-free but
    # kept per row so merging stays a plain sum.
    out = np.zeros((len(rhos), 3), dtype=np.int64)
    for i, rho in enumerate(rhos):
        orth = math.sqrt(1.0 - rho * rho)
        path2 = rho * path1 + orth * path_perp
        if want_inf:
            flag2 = path2.min(axis=1) < -x2
        else:
            flag2 = path2.max(axis=1) > x2
        out[i] = (int((flag1 & flag2).sum()), int(flag1.sum()), int(flag2.sum()))
    return out


def dependence_probe_grid(
    rhos,
    t: float,
    x1: float,
    x2: float,
    n: int,
    seed: int,
    mode: str = "sup",
    r: float = 0.0,
    workers: int = 1,
    steps: int = 10_000,
) -> list[DependenceProbe]:
    """dependence_probe for several correlations, sharing the underlying
    Gaussian draws across the rho values (estimates are valid per rho,
    merely correlated across rho)."""
    if mode not in PROBE_MODES:
        raise ValueError(f"mode must be one of {PROBE_MODES}")
    if mode.startswith("discounted") and r <= 0.0:
        raise ValueError("discounted modes require r > 0")
    if x1 <= 0.0 or x2 <= 0.0:
        raise ValueError("x1, x2 must be > 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    rhos = [float(v) for v in rhos]
    if any(not -1.0 <= v <= 1.0 for v in rhos):
        raise ValueError("rho must lie in [-1, 1]")

    scales = _probe_step_scales(mode, r, t, steps)
    want_inf = mode.endswith("inf")
    sizes = [_PROBE_CHUNK] * (n // _PROBE_CHUNK)
    if n % _PROBE_CHUNK:
        sizes.append(n % _PROBE_CHUNK)
    tasks = [(rhos, x1, x2, seed, ci, size, scales, want_inf) for ci, size in enumerate(sizes)]

    if workers == 1 or len(tasks) == 1:
        parts = [_probe_chunk_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_probe_chunk_task, tasks, chunksize=4))

    totals = np.sum(parts, axis=0)
    return [
        DependenceProbe(
            joint=Estimate.from_counts(int(row[0]), n),
            marg1=Estimate.from_counts(int(row[1]), n),
            marg2=Estimate.from_counts(int(row[2]), n),
        )
        for row in totals
    ]


def dependence_probe(
    rho: float,
    t: float,
    x1: float,
    x2: float,
    n: int,
    seed: int,
    mode: str = "sup",
    r: float = 0.0,
    workers: int = 1,
    steps: int = 10_000,
) -> DependenceProbe:
    """Estimate P(extreme1 beyond x1, extreme2 beyond x2) and the marginals
    for a correlated (optionally discounted) Brownian pair on a fine grid.

    Modes: "sup"/"inf" probe the running supremum above x / infimum below
    -x of the plain pair; the "discounted_*" modes probe the integrals
    int_0^s e^{-rl} dB_i(l).  Grid step is t/steps (default t/10^4).
    """
    return dependence_probe_grid([rho], t, x1, x2, n, seed, mode=mode, r=r,
                                 workers=workers, steps=steps)[0]


def sum_reduction_probe(
    sigma1: float,
    sigma2: float,
    rho: float,
    r: float,
    t: float,
    n: int,
    seed: int,
) -> SumReductionProbe:
    """Check that sigma1*D1(t) + sigma2*D2(t) has the variance of the single
    driver sqrt(sigma1^2 + sigma2^2 + 2 rho sigma1 sigma2) * W: draws the
    discounted pair exactly (one Gaussian step) and standardizes the sample
    variance with the chi-square standard error."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    if r < 0.0:
        raise ValueError("r must be >= 0")
    v = t if r == 0.0 else (-math.expm1(-2.0 * r * t)) / (2.0 * r)
    rng = substream(seed, 0)
    z = rng.standard_normal((2, n))
    sd = math.sqrt(v)
    d1 = sd * z[0]
    d2 = sd * (rho * z[0] + math.sqrt(1.0 - rho * rho) * z[1])
    x = sigma1 * d1 + sigma2 * d2
    sample_var = float(np.var(x, ddof=1))
    theory_var = (sigma1**2 + sigma2**2 + 2.0 * rho * sigma1 * sigma2) * v
    if theory_var == 0.0:
        z_score = 0.0 if sample_var == 0.0 else math.inf
    else:
        z_score = (sample_var - theory_var) / (theory_var * math.sqrt(2.0 / (n - 1)))
    return SumReductionProbe(sample_var=sample_var, theory_var=theory_var, z_score=z_score)
