"""Parametric claim-size distributions.

Each distribution exposes the survival function ``tail``, the inverse CDF
``quantile``, inverse-CDF sampling ``sample`` (exactly one uniform consumed
per draw, so path simulation is reproducible from the stream), and the mean.
All of tail/quantile accept scalars or numpy arrays.

``class_tag`` is declarative metadata: "subexponential" for Pareto,
Weibull with shape < 1 and Lognormal; "light" for Exponential, which is
included as a contrast case for negative-control experiments.  No numerical
class-membership test is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma_fn
from scipy.special import ndtr, ndtri

__all__ = [
    "ClaimDistribution",
    "Pareto",
    "Weibull",
    "Lognormal",
    "Exponential",
    "mixture_tail",
]

SUBEXPONENTIAL = "subexponential"
ERV = "erv"
LIGHT = "light"


@dataclass(frozen=True)
class ClaimDistribution:
    """Base type for nonnegative claim-size laws."""

    class_tag = SUBEXPONENTIAL

    def tail(self, x):
        """Survival function P(X > x); 1 below the support minimum."""
        raise NotImplementedError

    def quantile(self, p):
        """Inverse CDF: the x with F(x) = p, for p in (0, 1)."""
        p = np.asarray(p, dtype=float)
        if np.any(p <= 0.0) or np.any(p >= 1.0):
            raise ValueError("p must lie in the open interval (0, 1)")
        return self._quantile(p)

    def _quantile(self, p):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-CDF draw(s): quantile(U) with U uniform on [0, 1)."""
        return self._quantile(np.asarray(rng.random(size)))

    def mean(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Pareto(ClaimDistribution):
    """Pareto law on [xm, inf): tail (xm/x)^alpha."""

    alpha: float
    xm: float

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError("alpha must be > 0")
        if not self.xm > 0.0:
            raise ValueError("xm must be > 0")

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= self.xm, 1.0, (self.xm / np.maximum(x, self.xm)) ** self.alpha)
        return out if out.ndim else float(out)

    def _quantile(self, p):
        out = self.xm * (1.0 - p) ** (-1.0 / self.alpha)
        return out if np.ndim(out) else float(out)

    def mean(self) -> float:
        if self.alpha <= 1.0:
            return math.inf
        return self.alpha * self.xm / (self.alpha - 1.0)


@dataclass(frozen=True)
class Weibull(ClaimDistribution):
    """Heavy-tailed Weibull: tail exp(-(x/scale)^shape) with shape in (0, 1)."""

    shape: float
    scale: float

    def __post_init__(self):
        if not 0.0 < self.shape < 1.0:
            raise ValueError("shape must lie in (0, 1); use Exponential for shape = 1")
        if not self.scale > 0.0:
            raise ValueError("scale must be > 0")

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 0.0, 1.0, np.exp(-((np.maximum(x, 0.0) / self.scale) ** self.shape)))
        return out if out.ndim else float(out)

    def _quantile(self, p):
        out = self.scale * (-np.log1p(-p)) ** (1.0 / self.shape)
        return out if np.ndim(out) else float(out)

    def mean(self) -> float:
        return self.scale * float(_gamma_fn(1.0 + 1.0 / self.shape))


@dataclass(frozen=True)
class Lognormal(ClaimDistribution):
    """Lognormal with log-location mu and log-scale s."""

    mu: float
    s: float

    def __post_init__(self):
        if not self.s > 0.0:
            raise ValueError("s must be > 0")

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 0.0, 1.0, ndtr(-(np.log(np.maximum(x, 1e-300)) - self.mu) / self.s))
        return out if out.ndim else float(out)

    def _quantile(self, p):
        out = np.exp(self.mu + self.s * ndtri(p))
        return out if np.ndim(out) else float(out)

    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.s**2)


@dataclass(frozen=True)
class Exponential(ClaimDistribution):
    """Exponential law; light-tailed contrast case, not a theorem regime."""

    rate: float

    class_tag = LIGHT

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ValueError("rate must be > 0")

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 0.0, 1.0, np.exp(-self.rate * np.maximum(x, 0.0)))
        return out if out.ndim else float(out)

    def _quantile(self, p):
        out = -np.log1p(-p) / self.rate
        return out if np.ndim(out) else float(out)

    def mean(self) -> float:
        return 1.0 / self.rate


def mixture_tail(dist1: ClaimDistribution, dist2: ClaimDistribution,
                 lambda1: float, lambda2: float, x):
    """Tail of the arrival-rate mixture xi*X1 + (1-xi)*X2.

    xi picks component 1 with probability lambda1/(lambda1+lambda2); this is
    the claim law of the superposed arrival process when the two counting
    processes are independent Poisson.
    """
    if not (lambda1 > 0.0 and lambda2 > 0.0):
        raise ValueError("arrival rates must be > 0")
    w1 = lambda1 / (lambda1 + lambda2)
    return w1 * dist1.tail(x) + (1.0 - w1) * dist2.tail(x)
