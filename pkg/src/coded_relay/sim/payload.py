"""Counter-based payload symbols.

Source content never influences the dynamics, so instead of drawing it from
the dynamics stream each symbol is a splitmix64 hash of
``(key, pair, generation, index)``.  Both engines use the same function, and
a decoded generation can be checked against its payload without storing it.
"""

from __future__ import annotations

import numpy as np

MASK = (1 << 64) - 1


def mix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def _mix64_vec(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def payload_symbols(key: int, pair: int, gen: int, m: int, q: int) -> np.ndarray:
    base = (key ^ (pair << 40) ^ (gen << 20)) & MASK
    x = np.uint64(base) ^ np.arange(m, dtype=np.uint64)
    return (_mix64_vec(x) & np.uint64(q - 1)).astype(np.int64)
