"""Fixed, documented 64-bit PRNG used for corpus sampling.

Corpus samples must be reproducible across platforms and languages, so the
sampler does not depend on any library's generator.  The algorithm is
SplitMix64 (Steele, Lea & Flood 2014) with unbiased bounded draws by
rejection; the exact recipe is written out in FORMATS.md.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """SplitMix64 stream seeded with a 64-bit integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle_prefix(self, items: list, k: int) -> None:
        """Partial Fisher-Yates: after the call, items[:k] is a uniform
        k-subset of the input in uniform random order."""
        n = len(items)
        for i in range(min(k, n - 1)):
            j = i + self.randbelow(n - i)
            items[i], items[j] = items[j], items[i]


def derive_seed(seed: int, *components) -> int:
    """Stable sub-stream seed for (seed, component...) tuples.

    Components may be ints or strings; each is folded in through one
    SplitMix64 step so distinct tuples give uncorrelated streams.
    """
    state = SplitMix64(seed).next_u64()
    for component in components:
        if isinstance(component, str):
            folded = 0
            for byte in component.encode("utf-8"):
                folded = SplitMix64(folded ^ byte).next_u64()
            component = folded
        state = SplitMix64(state ^ (component & _MASK64)).next_u64()
    return state
