"""Counter-based randomness.

Every random decision in the package is a pure function of a 64-bit seed
and integer coordinates (site, sample index, ...), so results never depend
on query order, scheduling, or worker count.  The mixer is splitmix64; the
same arithmetic is implemented three times (Python ints, NumPy uint64
arrays, and inside the numba kernels) and cross-checked by tests.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z = (x + _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def site_hash(seed: int, q: int, r: int) -> int:
    """64-bit hash of (seed, site); identical to the vectorized version."""
    h = mix64(seed & _MASK)
    h = mix64(h ^ (q & _MASK))
    h = mix64(h ^ (r & _MASK))
    return h


def site_color(seed: int, q: int, r: int) -> int:
    """+1 (blue) or -1 (yellow), a fair coin per (seed, site)."""
    return 1 if (site_hash(seed, q, r) >> 63) else -1


def site_colors_array(seed: int, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Vectorized site_color; returns int8 array of +1/-1."""
    with np.errstate(over="ignore"):
        g = np.uint64(_GAMMA)
        m1 = np.uint64(_M1)
        m2 = np.uint64(_M2)

        def _mix(z):
            z = z + g
            z = (z ^ (z >> np.uint64(30))) * m1
            z = (z ^ (z >> np.uint64(27))) * m2
            return z ^ (z >> np.uint64(31))

        h = _mix(np.full(q.shape, np.uint64(seed & _MASK)))
        h = _mix(h ^ q.astype(np.int64).view(np.uint64))
        h = _mix(h ^ r.astype(np.int64).view(np.uint64))
    return np.where(h >> np.uint64(63), 1, -1).astype(np.int8)


def stream_id(name: str) -> int:
    """Stable 64-bit identifier for a named experiment stream."""
    return int.from_bytes(hashlib.blake2b(name.encode(), digest_size=8).digest(), "big")


def derive_seed(root_seed: int, name: str, index: int = 0) -> int:
    """Seed for sample `index` of stream `name`; independent of scheduling."""
    h = mix64(root_seed & _MASK)
    h = mix64(h ^ stream_id(name))
    h = mix64(h ^ (index & _MASK))
    return h
