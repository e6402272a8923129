"""Platform-independent pseudo-random stream used for fold assignment.

SplitMix64 (Steele, Lea & Flood 2014) on Python integers, plus an unbiased
Fisher-Yates shuffle. Kept deliberately separate from numpy's generators so
fold plans never change with a numpy upgrade.
"""

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def derive_seed(seed: int, *path: int) -> int:
    """Deterministic child seed, e.g. ``derive_seed(seed, repeat, fold)``."""
    g = SplitMix64(seed)
    out = g.next_u64()
    for p in path:
        g = SplitMix64(out ^ ((p + 1) * 0xD1B54A32D192ED03 & _MASK))
        out = g.next_u64()
    return out
