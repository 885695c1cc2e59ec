"""Counter-based random primitives.

Everything that must be reproducible independent of execution order
(edge-removal sampling, per-walk random streams) derives its randomness
from a stateless splitmix64 hash of integer coordinates instead of a
shared mutable generator. Two runs that evaluate cells in a different
order therefore draw identical values.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def hash_u64(*coords) -> np.ndarray:
    """splitmix64-style hash of one or more integer coordinate arrays.

    Scalars and arrays broadcast; the result is a uint64 array (or scalar)
    that depends on every coordinate.
    """
    with np.errstate(over="ignore"):
        acc = np.uint64(0x5851F42D4C957F2D)
        for c in coords:
            arr = np.asarray(c, dtype=np.uint64)
            acc = _mix((acc + _GAMMA) ^ (arr * _GAMMA))
    return acc


def hash_unit(*coords) -> np.ndarray:
    """Uniform float64 in [0, 1) derived from :func:`hash_u64`."""
    bits = hash_u64(*coords)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def seeded_rng(*coords) -> np.random.Generator:
    """A PCG64 generator keyed by integer coordinates (order-independent setup)."""
    return np.random.default_rng(np.random.SeedSequence(int(hash_u64(*coords))))
