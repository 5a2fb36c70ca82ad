"""Deterministic PRNG used by all instance generators.

xoshiro256** seeded through splitmix64, so generated instances are
bit-identical across platforms and numpy versions.  Child streams are
derived from (seed, key) so each consumer (eigenvalues, orthogonal
factors, linear terms, vertices) draws from its own stream.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z):
    z = z & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _splitmix64(state):
    state = (state + _GOLDEN) & _MASK
    return state, _mix64(state)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256StarStar:
    """xoshiro256** with splitmix64 state expansion."""

    def __init__(self, seed):
        self.seed = seed & _MASK
        state = self.seed
        s = []
        for _ in range(4):
            state, v = _splitmix64(state)
            s.append(v)
        self._s = s
        self._spare_normal = None

    def spawn(self, key):
        """Child stream for consumer `key`; independent of draw order."""
        return Xoshiro256StarStar(_mix64(self.seed ^ ((key + 1) * _GOLDEN)))

    def next_u64(self):
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self):
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform_array(self, n):
        return np.array([self.uniform() for _ in range(n)], dtype=np.float64)

    def integer(self, n):
        """Uniform integer in {0, ..., n-1} (unbiased, rejection sampling)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (_MASK + 1) - ((_MASK + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def normal(self):
        """Standard normal via Box-Muller (pairs cached)."""
        if self._spare_normal is not None:
            v = self._spare_normal
            self._spare_normal = None
            return v
        while True:
            u1 = self.uniform()
            if u1 > 0.0:
                break
        u2 = self.uniform()
        r = np.sqrt(-2.0 * np.log(u1))
        self._spare_normal = r * np.sin(2.0 * np.pi * u2)
        return r * np.cos(2.0 * np.pi * u2)

    def normal_array(self, n):
        return np.array([self.normal() for _ in range(n)], dtype=np.float64)

    def permutation(self, n):
        """Fisher-Yates shuffle of range(n)."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.integer(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return np.array(perm, dtype=np.int64)
