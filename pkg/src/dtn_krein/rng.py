"""Splittable counter-based random numbers (SplitMix64).

Algorithm
---------
A stream is a 64-bit ``seed`` plus a 64-bit ``counter``.  Draw number ``k``
(0-based) of a stream is::

    z  = seed + (k + 1) * 0x9E3779B97F4A7C15          (mod 2**64)
    z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9         (mod 2**64)
    z  = (z ^ (z >> 27)) * 0x94D049BB133111EB         (mod 2**64)
    out = z ^ (z >> 31)

which is exactly the output sequence of Steele/Lea/Flood SplitMix64 started
at ``seed``.  ``split(key)`` derives an independent child stream whose seed
is ``mix(seed ^ mix(key + 0x9E3779B97F4A7C15))``; it does not advance the
parent.  Doubles in [0, 1) are ``(out >> 11) * 2**-53``.

Because draws are addressed by counter, any implementation of this contract
generates the same models from the same seed.
"""
import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def _mix_array(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_2)
    return z ^ (z >> np.uint64(31))


def mix64(z):
    """Scalar SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Counter-addressed SplitMix64 stream.

    >>> SplitMix64(0).next_u64()
    16294208416658607535
    """

    def __init__(self, seed, counter=0):
        self.seed = int(seed) & MASK64
        self.counter = int(counter)

    def u64(self, n):
        """Next `n` raw 64-bit outputs as a uint64 array."""
        k = np.arange(self.counter + 1, self.counter + 1 + n, dtype=np.uint64)
        self.counter += n
        z = np.uint64(self.seed) + k * np.uint64(GOLDEN_GAMMA)
        return _mix_array(z)

    def next_u64(self):
        return int(self.u64(1)[0])

    def uniform(self, n, low=0.0, high=1.0):
        u = (self.u64(n) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
        return low + (high - low) * u

    def integers(self, low, high, n=None):
        """Integers in ``[low, high)``; scalar when `n` is None."""
        u = self.uniform(1 if n is None else n)
        out = low + np.floor(u * (high - low)).astype(np.int64)
        return int(out[0]) if n is None else out

    def split(self, key):
        child = mix64(self.seed ^ mix64(int(key) + GOLDEN_GAMMA))
        return SplitMix64(child)
