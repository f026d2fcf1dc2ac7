"""Deterministic random primitives: SplitMix64 and a seeded Fisher-Yates shuffle.

Everything downstream that needs randomness (dataset splits, batch shuffles,
weight initialization) draws from these routines, so results are reproducible
bit for bit on any platform without depending on a library RNG.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# scale factor mapping a 53-bit integer to [0, 1)
_INV_2_53 = 2.0**-53


class SplitMix64:
    """64-bit SplitMix generator.

    State update: x += 0x9E3779B97F4A7C15.  Output mixing:
    z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9,
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB, return z ^ (z >> 31),
    all modulo 2**64.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits of the next output."""
        return (self.next_u64() >> 11) * _INV_2_53

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection on the 64-bit output.

        Draws are rejected at or above the largest multiple of n that fits
        in 64 bits, which removes modulo bias.
        """
        if n <= 0:
            raise InvalidParameterError(f"bound must be positive, got {n}")
        limit = ((1 << 64) // n) * n
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n


def shuffled_indices(n: int, seed: int) -> list[int]:
    """Fisher-Yates permutation of range(n) driven by SplitMix64(seed).

    Iterates i from n-1 down to 1, drawing j in [0, i] via next_below(i+1)
    and swapping positions i and j.
    """
    if n < 0:
        raise InvalidParameterError(f"n must be nonnegative, got {n}")
    gen = SplitMix64(seed)
    idx = list(range(n))
    for i in range(n - 1, 0, -1):
        j = gen.next_below(i + 1)
        idx[i], idx[j] = idx[j], idx[i]
    return idx


def uniform_doubles(count: int, seed: int) -> np.ndarray:
    """Vectorized stream equal to count successive SplitMix64 next_double calls.

    The state update is a pure 64-bit addition, so state k is
    seed + (k+1)*GOLDEN mod 2**64 and the whole stream can be mixed in one
    pass over a uint64 array.
    """
    if count < 0:
        raise InvalidParameterError(f"count must be nonnegative, got {count}")
    steps = np.arange(1, count + 1, dtype=np.uint64)
    x = np.uint64(_GOLDEN) * steps + np.uint64(int(seed) & _MASK64)
    z = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53
