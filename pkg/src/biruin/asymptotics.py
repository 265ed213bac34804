"""Large-capital asymptotic formulas for the four finite-time ruin events.

Every formula is one of four dispatch cases, (shared vs independent arrival
processes) x (r = 0 vs r > 0).  The r > 0 formulas are built from the tail
integral

    I(u) = int_u^{u e^{rT}} tail(y) / y dy,

evaluated in closed form for Pareto tails above the support minimum and by
adaptive Simpson quadrature otherwise:

    case            both-at-once (max)        at-least-one (min)             total (sum, at s = u1+u2)
    shared, r=0     lam*T*(1+lam*T)*t1*t2     lam*T*(t1+t2)                  lam*T*(t1(s)+t2(s))
    shared, r>0     lam*(lam+1/T)/r^2*I1*I2   lam/r*(I1+I2)                  lam/r*(I1(s)+I2(s))
    indep,  r=0     l1*l2*T^2*t1*t2           T*(l1*t1+l2*t2)                T*(l1*t1(s)+l2*t2(s))
    indep,  r>0     l1*l2/r^2*I1*I2           (l1*I1+l2*I2)/r                (l1*I1(s)+l2*I2(s))/r

with ti = tail_i(ui), li the component intensities, and lam the shared
intensity.  The shared r>0 sum case uses the proportional-tails reduction
(lam*T*int_0^1 [t1+t2](s e^{rTz}) dz equals lam/r*(I1(s)+I2(s)) by the
substitution y = s e^{rTz}); general numeric convolution tails are out of
scope.  No exact both-eventually ("and") asymptotic exists — only the
upper bound carried by the max-order expression is exposed.

Values are true asymptotics: they may exceed 1 at small capital, in which
case they are returned as-is with ``warn_gt_one`` set.  Hypothesis checks
(rho in (-1, 0], subexponential claim tags) emit warnings, never errors,
so violation regimes (e.g. the light-tail negative control) stay runnable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .distributions import LIGHT, ClaimDistribution, Pareto
from .process import ModelConfig

__all__ = [
    "QuadratureError",
    "AsymptoticResult",
    "tail_integral",
    "psi_uni_asym",
    "psi_max_asym",
    "psi_min_asym",
    "psi_sum_asym",
    "psi_and_upper",
]

CASE_IDS = (
    "T31a_max", "T31a_min", "T31b_sum",
    "T32a_max", "T32a_min", "T32b_sum",
    "T33a_max", "T33a_min", "T33b_sum",
    "T34a_max", "T34a_min", "T34b_sum",
    "L43_uni", "L44_uni", "and_upper",
)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge within the depth limit."""


@dataclass(frozen=True)
class AsymptoticResult:
    """An evaluated asymptotic formula with provenance."""

    value: float
    case_id: str
    u1: float
    u2: float | None = None
    notes: tuple[str, ...] = ()

    @property
    def warn_gt_one(self) -> bool:
        return self.value > 1.0


def _adaptive_simpson(f, a: float, b: float, rel_tol: float = 1e-10, max_depth: int = 40) -> float:
    """Classic recursive adaptive Simpson with Richardson correction."""
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = rel_tol * max(abs(whole), 1e-300)

    def recurse(a, fa, m, fm, b, fb, whole, eps, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        if depth >= max_depth:
            raise QuadratureError(f"adaptive Simpson did not converge at depth {max_depth}")
        return recurse(a, fa, lm, flm, m, fm, left, eps / 2.0, depth + 1) + recurse(
            m, fm, rm, frm, b, fb, right, eps / 2.0, depth + 1
        )

    return recurse(a, fa, m, fm, b, fb, whole, eps, 0)


def tail_integral(dist: ClaimDistribution, u: float, r: float, T: float) -> float:
    """int_u^{u e^{rT}} tail(y)/y dy — the building block of every r>0 formula.

    Closed form for Pareto with u >= xm; otherwise computed as
    r*T*int_0^1 tail(u e^{rTz}) dz by adaptive Simpson (relative tolerance
    1e-10, max depth 40).
    """
    if u <= 0.0:
        raise ValueError("u must be > 0")
    if r <= 0.0:
        raise ValueError("r must be > 0; use the r = 0 formulas instead")
    if T <= 0.0:
        raise ValueError("T must be > 0")
    if isinstance(dist, Pareto) and u >= dist.xm:
        # int (xm/y)^alpha / y dy = (xm^alpha/alpha) * (u^-alpha - (u e^{rT})^-alpha)
        a = dist.alpha
        return (dist.xm**a / a) * u ** (-a) * (-math.expm1(-a * r * T))
    rt = r * T
    return rt * _adaptive_simpson(lambda z: float(dist.tail(u * math.exp(rt * z))), 0.0, 1.0)


def _hypothesis_notes(model: ModelConfig) -> tuple[str, ...]:
    notes = []
    if not -1.0 < model.rho <= 0.0:
        notes.append(f"rho={model.rho:g} outside the theorem hypothesis (-1, 0]")
    for i, dist in ((1, model.dist1), (2, model.dist2)):
        if dist.class_tag == LIGHT:
            notes.append(f"dist{i} is light-tailed; subexponential hypothesis violated")
    for n in notes:
        warnings.warn(n, stacklevel=3)
    return tuple(notes)


def _finish(value: float, case_id: str, u1: float, u2: float | None,
            notes: tuple[str, ...]) -> AsymptoticResult:
    if value > 1.0:
        notes = notes + ("value exceeds 1: outside the asymptotic regime",)
    return AsymptoticResult(value=value, case_id=case_id, u1=u1, u2=u2, notes=notes)


def psi_uni_asym(lam: float, dist: ClaimDistribution, u: float, r: float, T: float) -> AsymptoticResult:
    """Single-line finite-time ruin asymptotic: lam*T*tail(u) at r=0, else
    (lam/r) * tail_integral."""
    if u <= 0.0:
        raise ValueError("u must be > 0")
    if r < 0.0:
        raise ValueError("r must be >= 0")
    notes = ()
    if dist.class_tag == LIGHT:
        notes = ("dist is light-tailed; subexponential hypothesis violated",)
        warnings.warn(notes[0], stacklevel=2)
    if r == 0.0:
        return _finish(lam * T * float(dist.tail(u)), "L43_uni", u, None, notes)
    return _finish((lam / r) * tail_integral(dist, u, r, T), "L44_uni", u, None, notes)


def _tails_or_integrals(model: ModelConfig, u1: float, u2: float):
    if model.r == 0.0:
        return float(model.dist1.tail(u1)), float(model.dist2.tail(u2))
    return (
        tail_integral(model.dist1, u1, model.r, model.T),
        tail_integral(model.dist2, u2, model.r, model.T),
    )


def psi_max_asym(model: ModelConfig, u1: float, u2: float) -> AsymptoticResult:
    """Asymptotic probability that both lines are negative at the same time."""
    notes = _hypothesis_notes(model)
    lam, T, r = model.lambda1, model.T, model.r
    g1, g2 = _tails_or_integrals(model, u1, u2)
    if model.common_shock:
        if r == 0.0:
            return _finish(lam * T * (1.0 + lam * T) * g1 * g2, "T31a_max", u1, u2, notes)
        return _finish(lam * (lam + 1.0 / T) / r**2 * g1 * g2, "T32a_max", u1, u2, notes)
    lam2 = model.lambda2
    if r == 0.0:
        return _finish(lam * lam2 * T**2 * g1 * g2, "T33a_max", u1, u2, notes)
    return _finish(lam * lam2 / r**2 * g1 * g2, "T34a_max", u1, u2, notes)


def psi_min_asym(model: ModelConfig, u1: float, u2: float) -> AsymptoticResult:
    """Asymptotic probability that at least one line goes negative."""
    notes = _hypothesis_notes(model)
    lam, T, r = model.lambda1, model.T, model.r
    g1, g2 = _tails_or_integrals(model, u1, u2)
    if model.common_shock:
        if r == 0.0:
            return _finish(lam * T * (g1 + g2), "T31a_min", u1, u2, notes)
        return _finish(lam / r * (g1 + g2), "T32a_min", u1, u2, notes)
    lam2 = model.lambda2
    if r == 0.0:
        return _finish(T * (lam * g1 + lam2 * g2), "T33a_min", u1, u2, notes)
    return _finish((lam * g1 + lam2 * g2) / r, "T34a_min", u1, u2, notes)


def psi_sum_asym(model: ModelConfig, u1: float, u2: float) -> AsymptoticResult:
    """Asymptotic probability that the two-line total goes negative,
    evaluated at the combined capital s = u1 + u2."""
    s = u1 + u2
    if s <= 0.0:
        raise ValueError("u1 + u2 must be > 0")
    notes = _hypothesis_notes(model)
    lam, T, r = model.lambda1, model.T, model.r
    g1, g2 = _tails_or_integrals(model, s, s)
    if model.common_shock:
        if r == 0.0:
            return _finish(lam * T * (g1 + g2), "T31b_sum", u1, u2, notes)
        return _finish(lam / r * (g1 + g2), "T32b_sum", u1, u2, notes)
    lam2 = model.lambda2
    if r == 0.0:
        return _finish(T * (lam * g1 + lam2 * g2), "T33b_sum", u1, u2, notes)
    return _finish((lam * g1 + lam2 * g2) / r, "T34b_sum", u1, u2, notes)


def psi_and_upper(model: ModelConfig, u1: float, u2: float) -> AsymptoticResult:
    """Order upper bound for both-lines-eventually-ruined.

    No exact asymptotic is available for this event — only the sandwich
    max <= and <= min plus the fact that it is bounded by the max-order
    expression; the returned value is psi_max_asym relabeled.
    """
    res = psi_max_asym(model, u1, u2)
    return AsymptoticResult(value=res.value, case_id="and_upper", u1=u1, u2=u2, notes=res.notes)
