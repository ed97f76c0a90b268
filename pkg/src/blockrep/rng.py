"""Seeded random number generation.

All randomness in blockrep flows through a fixed splitmix64 stream so that
synthetic corpora, shuffles and jittered sampling regenerate identically on
any platform and any Python / NumPy version.  The generator is the standard
splitmix64: state advances by a golden-ratio increment and each output is an
avalanche mix of the state.  Output k of a stream seeded with s is therefore
``mix64(s + k * GOLDEN)``, which also makes bulk generation vectorizable.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """Scalar splitmix64 finalizer (python ints, masked to 64 bits)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def splitmix_stream(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs ``offset+1 .. offset+count`` of the stream, as uint64.

    Vectorized equivalent of calling SplitMix64(seed).next_u64() repeatedly.
    """
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
    return z


def uniform_doubles(bits: np.ndarray) -> np.ndarray:
    """Map uint64 outputs to doubles in [0, 1) using the top 53 bits."""
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


class SplitMix64:
    """Sequential splitmix64 stream for scalar draws.

    Produces exactly the same values as :func:`splitmix_stream` with matching
    seed and positions; kernels that shuffle in compiled code inline the same
    recurrence so both backends see identical streams.
    """

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def next_double(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) via rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (MASK64 + 1) - ((MASK64 + 1) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle of a python list."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]
