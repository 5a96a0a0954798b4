"""Counter-based deterministic randomness (Philox keyed by seed and shot)."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


class ShotRng:
    """Philox-4x64 keyed by (seed, shot); draws are bit-identical across platforms.

    Uniform integers come from rejection sampling over raw 64-bit words, so
    arbitrarily large ranges are supported.
    """

    def __init__(self, seed: int = 0, shot: int = 0):
        self.seed = int(seed) & _MASK64
        self.shot = int(shot) & _MASK64
        self._bitgen = np.random.Philox(key=[self.seed, self.shot])

    def _word(self) -> int:
        return int(self._bitgen.random_raw())

    def randbits(self, k: int) -> int:
        out, have = 0, 0
        while have < k:
            out |= self._word() << have
            have += 64
        return out & ((1 << k) - 1)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        while True:
            r = self.randbits(k)
            if r < n:
                return r

    def randrange(self, start: int, stop: int | None = None) -> int:
        if stop is None:
            start, stop = 0, start
        return start + self.randbelow(stop - start)
