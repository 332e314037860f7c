"""Counter-based noise source used by the stochastic attacks.

Every sample position owns an independent splitmix64 stream whose state is
``seed ^ (index * 0x9E3779B97F4A7C15)`` (mod 2**64).  Uniforms take the top 53
bits of a stream output; normals use Box-Muller on the first two uniforms of
a stream.  Results do not depend on traversal order, so the same (seed, index)
always yields the same values.
"""
from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MASK64 = (1 << 64) - 1
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / (1 << 53)


def splitmix64_next(state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Advance uint64 states; returns (new_state, output)."""
    state = state + GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    z = z ^ (z >> np.uint64(31))
    return state, z


def stream_states(seed: int, n: int, offset: int = 0) -> np.ndarray:
    idx = np.arange(offset, offset + n, dtype=np.uint64)
    return np.uint64(seed & _MASK64) ^ (idx * GOLDEN)


def uniforms(state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One uniform in [0, 1) per stream; returns (new_state, values)."""
    state, z = splitmix64_next(state)
    return state, (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


def normals(seed: int, n: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
    """``n`` normal deviates, entry ``i`` drawn from stream ``i``."""
    with np.errstate(over="ignore"):
        state = stream_states(seed, n)
        state, u1 = uniforms(state)
        state, u2 = uniforms(state)
    # 1 - u1 lies in (0, 1], keeping the log finite
    r = np.sqrt(-2.0 * np.log1p(-u1))
    return mean + std * r * np.cos(2.0 * np.pi * u2)


def raw64(seed: int, n: int, draws: int = 1) -> list[np.ndarray]:
    """First ``draws`` raw 64-bit outputs of streams 0..n-1."""
    out = []
    with np.errstate(over="ignore"):
        state = stream_states(seed, n)
        for _ in range(draws):
            state, z = splitmix64_next(state)
            out.append(z)
    return out


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h


def cell_seed(master_seed: int, *parts: str) -> int:
    """Seed for one batch cell: ``master_seed XOR FNV-1a(parts joined by '|')``."""
    return (master_seed & _MASK64) ^ fnv1a64("|".join(parts))
