"""Deterministic derivation of independent random streams from one seed.

Batch b of a Monte Carlo run draws from a generator keyed by
``substream_key(seed, b)``.  Keys are produced by the splitmix64 finalizer
(an avalanche-quality 64-bit mixer), so results depend only on
``(seed, index)`` and never on worker count or scheduling order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 step: add the golden-ratio increment, then finalize."""
    x = (x + _GOLDEN) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def substream_key(seed: int, index: int) -> int:
    """Mix (seed, index) into a 64-bit stream key.

    The seed is diffused first so that nearby seeds do not produce
    nearby key sequences, then the index is folded in and diffused again.
    """
    if index < 0:
        raise ValueError("index must be non-negative")
    return splitmix64(splitmix64(seed & _MASK64) ^ (index & _MASK64))


def substream(seed: int, index: int) -> np.random.Generator:
    """Generator for the given (seed, index) pair; PCG64 under the hood."""
    return np.random.Generator(np.random.PCG64(substream_key(seed, index)))
