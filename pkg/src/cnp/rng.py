"""Seeded generator with a fixed, documented algorithm.

SplitMix64 (Steele, Lea & Flood 2014) drives everything random in the
interpreter, so a seed reproduces the same shuffles on any platform:

* ``next_u64``: ``state += 0x9E3779B97F4A7C15``, then the mix
  ``z = (z ^ z>>30) * 0xBF58476D1CE4E5B9``, ``z = (z ^ z>>27) * 0x94D049BB133111EB``,
  ``z ^ z>>31`` (all mod 2**64).
* ``below(n)``: rejection sampling. Draws ``x`` until ``x < 2**64 - (2**64 % n)``
  and returns ``x % n``.
* ``shuffle``: Fisher-Yates from the last index down, ``j = below(i + 1)``.
* ``random``: the top 53 bits of ``next_u64`` scaled by ``2**-53``.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int = 0):
        if not 0 <= seed <= _MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))
