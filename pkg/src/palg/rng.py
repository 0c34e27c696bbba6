"""splitmix64, the seeded generator behind every sampled sweep.

Kept deliberately tiny so that a sampled run can be replayed bit-for-bit
from the seed alone, independent of the Python or numpy version.
"""

_MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform-ish integer in [0, n) (plain modulo reduction)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def coin(self) -> bool:
        return bool(self.next_u64() >> 63)

    def subset(self, items, p_num=1, p_den=2):
        """Each item independently with probability ``p_num / p_den``."""
        return [x for x in items if self.below(p_den) < p_num]

    def shuffle(self, seq: list) -> None:
        """Fisher-Yates, in place."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def sample(self, items, k: int) -> list:
        """``k`` distinct items in random order."""
        pool = list(items)
        if not 0 <= k <= len(pool):
            raise ValueError(f"cannot draw {k} of {len(pool)} items")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
