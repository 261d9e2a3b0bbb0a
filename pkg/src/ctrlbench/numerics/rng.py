"""Seeded deterministic random stream.

Every random draw in the package flows through RngStream so runs are exactly
reproducible from a 64-bit seed.  The core generator is splitmix64; Gaussian
draws use the Box-Muller transform with the second variate cached.  Both are
fixed permanently so seeds stay portable across platforms and releases.
"""

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z):
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class RngStream:
    """splitmix64 stream with uniform, integer, and Gaussian draws.

    Single-owner mutable state: never share one stream across concurrent
    tasks; derive one per task with :func:`derive_stream`.
    """

    def __init__(self, seed):
        self.seed = int(seed) & _MASK
        self._state = self.seed
        self._cached_gauss = None

    def _next(self):
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, low=0.0, high=1.0):
        """Uniform draw in [low, high) with 53-bit resolution."""
        u = (self._next() >> 11) * (1.0 / (1 << 53))
        return low + (high - low) * u

    def randint(self, n):
        """Uniform integer in [0, n).  Modulo bias is < n / 2^64."""
        if n <= 0:
            raise ValueError("randint requires n >= 1")
        return self._next() % n

    def normal(self):
        """Standard Gaussian draw (Box-Muller, cached second variate)."""
        if self._cached_gauss is not None:
            z = self._cached_gauss
            self._cached_gauss = None
            return z
        u1 = (self._next() >> 11) * (1.0 / (1 << 53))
        u2 = (self._next() >> 11) * (1.0 / (1 << 53))
        radius = math.sqrt(-2.0 * math.log(1.0 - u1))
        theta = 2.0 * math.pi * u2
        self._cached_gauss = radius * math.sin(theta)
        return radius * math.cos(theta)

    def gaussian(self, sigma):
        """Zero-mean Gaussian with standard deviation sigma (>= 0).

        sigma = 0 returns exactly 0.0; the underlying draw is still consumed
        so the stream position does not depend on sigma.
        """
        if sigma < 0:
            raise ValueError("sigma must be >= 0")
        z = self.normal()
        return sigma * z

    def shuffle(self, items):
        """In-place Fisher-Yates shuffle of a mutable sequence."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def spawn(self, index):
        """Independent child stream for run/task ``index``."""
        return derive_stream(self.seed, index)


def derive_stream(master_seed, index):
    """Deterministic child stream from (master seed, run index)."""
    child_seed = _mix((int(master_seed) & _MASK) ^ _mix(int(index) & _MASK))
    return RngStream(child_seed)
