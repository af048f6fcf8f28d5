"""Fair-coin source and exact sampling from fair bits.

``uniform_below`` is the Fast Dice Roller: it keeps a value uniform on
``[0, v)`` and doubles ``v`` with each flip, returning once ``v >= T`` and
the value lands below ``T``.  ``sample_weighted`` walks the discrete
distribution generating tree of Knuth and Yao, reading the binary
expansions of ``m_k / T`` column by column.  Both return each outcome with
exactly its rational probability, and after d flips the mass still
unresolved for any single outcome is below ``2**-d``.
"""

from __future__ import annotations

import random
from typing import Sequence

__all__ = ["CoinSource", "flip", "uniform_below", "sample_weighted"]

_SEED_LIMIT = 1 << 64


class CoinSource:
    """Deterministic pseudorandom fair bits from a 64-bit seed.

    Bits are drawn 64 at a time from a Mersenne Twister and handed out least
    significant first.  A source has a single owner; do not share one across
    threads.
    """

    def __init__(self, seed: int = 0):
        if not isinstance(seed, int) or not 0 <= seed < _SEED_LIMIT:
            raise ValueError("seed must be an integer in [0, 2**64)")
        self.seed = seed
        self.consumed = 0
        self._rng = random.Random(seed)
        self._word = 0
        self._left = 0

    def flip(self) -> int:
        if self._left == 0:
            self._word = self._rng.getrandbits(64)
            self._left = 64
        bit = self._word & 1
        self._word >>= 1
        self._left -= 1
        self.consumed += 1
        return bit

    def __repr__(self):
        return f"CoinSource(seed={self.seed}, consumed={self.consumed})"


def flip(source) -> int:
    return source.flip()


def uniform_below(source, T: int) -> int:
    """Exactly uniform integer in [0, T); expected flips at most log2(T) + 2."""
    if T < 1:
        raise ValueError("uniform_below needs T >= 1")
    if T == 1:
        return 0
    v, c = 1, 0
    while True:
        v <<= 1
        c = (c << 1) | source.flip()
        if v >= T:
            if c < T:
                return c
            v -= T
            c -= T


def sample_weighted(source, weights: Sequence[int]) -> int:
    """Index k with probability exactly ``weights[k] / sum(weights)``."""
    weights = list(weights)
    if any((not isinstance(m, int)) or m < 0 for m in weights):
        raise ValueError("weights must be non-negative integers")
    total = sum(weights)
    if total == 0:
        raise ValueError("all weights are zero")
    live = [k for k, m in enumerate(weights) if m]
    if len(live) == 1:
        return live[0]
    # residues[k] / total is the not-yet-emitted tail of the expansion of m_k / total
    residues = [weights[k] for k in live]
    d = 0
    while True:
        d = 2 * d + source.flip()
        for j, k in enumerate(live):
            r = residues[j] << 1
            if r >= total:
                residues[j] = r - total
                d -= 1
                if d < 0:
                    return k
            else:
                residues[j] = r
