"""Deterministic 64-bit PRNG used by every generator and randomized solver.

xoshiro256** with splitmix64 state expansion.  All randomness in the
package flows through Rng so that instances and solver runs are
bit-reproducible across platforms and Python versions (the stdlib
Mersenne Twister float path is stable too, but pinning the algorithm
here makes the stream part of the artifact's contract).
"""

MASK64 = (1 << 64) - 1


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Rng:
    """xoshiro256** generator seeded from a single 64-bit integer."""

    def __init__(self, seed):
        s = int(seed) & MASK64
        state = []
        for _ in range(4):
            s, out = _splitmix64(s)
            state.append(out)
        self._s = state

    def next_u64(self):
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self):
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, lo, hi):
        return lo + (hi - lo) * self.random()

    def randint(self, lo, hi):
        """Uniform integer in [lo, hi] inclusive (rejection sampling)."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = (MASK64 + 1) - ((MASK64 + 1) % span)
        while True:
            u = self.next_u64()
            if u < limit:
                return lo + (u % span)

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def shuffle(self, items):
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]

    def sample(self, seq, k):
        """k distinct elements, order given by a partial shuffle."""
        items = list(seq)
        if k > len(items):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = self.randint(i, len(items) - 1)
            items[i], items[j] = items[j], items[i]
        return items[:k]

    def spawn(self, salt):
        """Independent child stream; deterministic in (seed path, salt)."""
        _, mixed = _splitmix64((self._child_base ^ (int(salt) * 0xA24BAED4963EE407)) & MASK64)
        return Rng(mixed)

    @property
    def _child_base(self):
        return (self._s[0] ^ _rotl(self._s[2], 13)) & MASK64


def child_seed(seed, salt):
    """Derive a 64-bit child seed without constructing an Rng."""
    _, a = _splitmix64(int(seed) & MASK64)
    _, b = _splitmix64((a ^ (int(salt) * 0xA24BAED4963EE407)) & MASK64)
    return b
