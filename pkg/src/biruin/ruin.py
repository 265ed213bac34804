"""Ruin detection on a discounted path.

Four ruin events are tracked: each component falling below zero
(first-passage times t1, t2), both components negative at the same instant
(max), and the two-line total falling below zero (sum).  "min" (at least
one line ruined) and "and" (both lines ruined, not necessarily at the same
instant) are derived as OR / AND of the component flags, which encodes the
identity  1{min} + 1{and} = 1{comp1} + 1{comp2}  exactly per path.

With ``bridge=True``, crossings strictly between grid instants are sampled
from the closed-form bridge minimum law for the component processes and the
sum process.  One uniform is drawn per examined interval and shared by the
three tests; since the sum's crossing probability never exceeds the larger
component probability, a sum crossing always comes with a component
crossing and the count ordering sum <= min stays exact.  Simultaneous
("max") ruin is detected on grid instants only: the joint crossing law of a
correlated bivariate bridge has no elementary closed form, and the
resulting downward bias is controlled by the grid step h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .process import DiscountedPath, _interval_cov

__all__ = ["RuinOutcome", "bridge_crossing_prob", "detect"]


@dataclass(frozen=True)
class RuinOutcome:
    """Per-path ruin flags and first-passage times (None when no ruin)."""

    ruin1: bool
    t1: float | None
    ruin2: bool
    t2: float | None
    ruin_max: bool
    t_max: float | None
    ruin_sum: bool
    t_sum: float | None

    @property
    def ruin_min(self) -> bool:
        return self.ruin1 or self.ruin2

    @property
    def ruin_and(self) -> bool:
        return self.ruin1 and self.ruin2

    @property
    def t_min(self) -> float | None:
        if not self.ruin_min:
            return None
        return min(t for t in (self.t1, self.t2) if t is not None)

    @property
    def t_and(self) -> float | None:
        if not self.ruin_and:
            return None
        return max(self.t1, self.t2)


def bridge_crossing_prob(a, b, v):
    """Probability that a Gaussian bridge with endpoint heights a, b above
    zero and total variance v dips below zero: exp(-2ab/v), and 1 whenever
    an endpoint is already at or below zero."""
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr <= 0.0):
        raise ValueError("v must be > 0")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    # abs() only keeps the masked negative-endpoint lanes from overflowing exp.
    out = np.where((a <= 0.0) | (b <= 0.0), 1.0, np.exp(-2.0 * np.abs(a * b) / v_arr))
    return out if out.ndim else float(out)


def _crossing_prob(a, b, v):
    """Bridge crossing probability, tolerating v == 0 (no diffusion)."""
    hit = (a <= 0.0) | (b <= 0.0)
    safe_v = np.where(v > 0.0, v, 1.0)
    p = np.where(v > 0.0, np.exp(-2.0 * np.abs(a * b) / safe_v), 0.0)
    return np.where(hit, 1.0, p)


def _first_time(times: np.ndarray, flags: np.ndarray) -> float:
    if not flags.any():
        return math.inf
    return float(times[int(np.argmax(flags))])


def detect(path: DiscountedPath, bridge: bool, rng: np.random.Generator) -> RuinOutcome:
    """Scan one path for all four ruin events.

    Bridge detections record the left endpoint of their interval as the
    first-passage time (time resolution <= grid step; probabilities are
    unaffected).  The rng is consumed only when ``bridge`` is true: one
    uniform per interval.
    """
    times = path.times
    s, t = times[:-1], times[1:]

    neg1 = (path.v1_pre < 0.0) | (path.v1_post < 0.0)
    neg2 = (path.v2_pre < 0.0) | (path.v2_post < 0.0)
    vs_pre = path.v1_pre + path.v2_pre
    vs_post = path.v1_post + path.v2_post
    neg_sum = (vs_pre < 0.0) | (vs_post < 0.0)
    neg_max = ((path.v1_pre < 0.0) & (path.v2_pre < 0.0)) | (
        (path.v1_post < 0.0) & (path.v2_post < 0.0)
    )

    t1 = _first_time(times, neg1)
    t2 = _first_time(times, neg2)
    t_sum = _first_time(times, neg_sum)
    t_max = _first_time(times, neg_max)

    if bridge:
        w = _interval_cov(path.r, s, t)
        u = rng.random(s.size)
        sig_sum_sq = max(
            path.sigma1**2 + path.sigma2**2 + 2.0 * path.rho * path.sigma1 * path.sigma2, 0.0
        )
        cross1 = u < _crossing_prob(path.v1_post[:-1], path.v1_pre[1:], path.sigma1**2 * w)
        cross2 = u < _crossing_prob(path.v2_post[:-1], path.v2_pre[1:], path.sigma2**2 * w)
        # Shared uniform: a sum crossing implies a component crossing
        # (p_sum <= max(p1, p2)); the conjunction pins that against
        # float rounding so count orderings stay exact.
        cross_sum = (u < _crossing_prob(vs_post[:-1], vs_pre[1:], sig_sum_sq * w)) & (cross1 | cross2)
        t1 = min(t1, _first_time(s, cross1))
        t2 = min(t2, _first_time(s, cross2))
        t_sum = min(t_sum, _first_time(s, cross_sum))

    return RuinOutcome(
        ruin1=math.isfinite(t1),
        t1=t1 if math.isfinite(t1) else None,
        ruin2=math.isfinite(t2),
        t2=t2 if math.isfinite(t2) else None,
        ruin_max=math.isfinite(t_max),
        t_max=t_max if math.isfinite(t_max) else None,
        ruin_sum=math.isfinite(t_sum),
        t_sum=t_sum if math.isfinite(t_sum) else None,
    )
