"""Deterministic, portable pseudo-random number generation.

Every seeded operation in the toolkit (stratified splitting, random
under-sampling, synthetic vector generation) draws from SplitMix64, a
64-bit generator with a one-word state (Steele, Lea & Flood 2014).  The
algorithm is spelled out here, with no dependency on platform or library
RNG internals, so that a seed reproduces bit-identical artifacts anywhere.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """SplitMix64 generator; state advances by the 64-bit golden ratio."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("below() requires n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, iterating from the last index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def derive_seed(seed: int, stream: int) -> int:
    """Child seed for stream number `stream` (0-based), independent per stream."""
    if stream < 0:
        raise ValueError("stream must be non-negative")
    gen = SplitMix64(seed)
    out = gen.next_u64()
    for _ in range(stream):
        out = gen.next_u64()
    return out
