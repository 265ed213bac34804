"""Independent brute-force oracles shared by the test suite.

These deliberately avoid the library's own formulas: the bridge-crossing
oracle builds bridges from raw Gaussian increments and extrapolates the
grid bias away, so it can confirm (or refute) the closed form exp(-2ab/v).
"""

from __future__ import annotations

import math

import numpy as np

_ALPHA = math.sqrt(2.0) / (math.sqrt(2.0) - 1.0)
_BETA = 1.0 / (math.sqrt(2.0) - 1.0)


def bridge_crossing_mc(a: float, b: float, v: float, n_bridges: int,
                       base_steps: int, seed: int) -> tuple[float, float]:
    """Brute-force P(bridge from a to b with total variance v dips below 0).

    Simulates bridges on a base grid and on its midpoint refinement (same
    underlying paths), then Richardson-extrapolates the O(sqrt(dt))
    discrete-monitoring bias away.  Returns (estimate, standard error); the
    SE accounts for the coarse/fine correlation exactly because the
    extrapolated estimator is a fixed linear combination per path.
    """
    rng = np.random.default_rng(seed)
    chunk = max(1, min(n_bridges, 2_000_000 // (2 * base_steps + 1)))
    sum_y = 0.0
    sum_y2 = 0.0
    done = 0
    m = base_steps
    dv = v / m
    frac_coarse = np.arange(1, m + 1) / m
    frac_fine = np.arange(1, 2 * m + 1) / (2 * m)
    while done < n_bridges:
        nb = min(chunk, n_bridges - done)
        dw = rng.normal(0.0, math.sqrt(dv), size=(nb, m)).astype(np.float32)
        w = np.cumsum(dw, axis=1)
        w_end = w[:, -1]
        # X(t) = a + W(t) + t*(b - a - W(1)); the endpoint pin is exact.
        corr = (b - a) - w_end
        x_coarse = a + w + frac_coarse * corr[:, None]
        hit_coarse = (x_coarse.min(axis=1) < 0.0) | (a < 0.0) | (b < 0.0)

        mid = rng.normal(0.0, math.sqrt(dv / 4.0), size=(nb, m)).astype(np.float32)
        w_left = np.concatenate([np.zeros((nb, 1), dtype=np.float32), w[:, :-1]], axis=1)
        w_mid = 0.5 * (w_left + w) + mid
        w_fine = np.empty((nb, 2 * m), dtype=np.float32)
        w_fine[:, 0::2] = w_mid
        w_fine[:, 1::2] = w
        x_fine = a + w_fine + frac_fine * corr[:, None]
        hit_fine = (x_fine.min(axis=1) < 0.0) | (a < 0.0) | (b < 0.0)

        y = _ALPHA * hit_fine.astype(float) - _BETA * hit_coarse.astype(float)
        sum_y += float(y.sum())
        sum_y2 += float((y * y).sum())
        done += nb
    mean = sum_y / n_bridges
    var = max(sum_y2 / n_bridges - mean * mean, 0.0)
    return mean, math.sqrt(var / n_bridges)
