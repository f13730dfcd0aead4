"""Counter-based uniform random numbers.

Every value is a pure function of (seed, stream, counter): the stream
usually indexes a ray and the counter indexes the draw within that ray. The
mixing function is the SplitMix64 finaliser, applied to a key chain, so
draws can be generated for any subset of rays in any order and still agree
bit for bit.
"""

import numpy as np

_M64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


def _mix64(z):
    with np.errstate(over="ignore"):
        z = z ^ (z >> _S30)
        z = z * _C1
        z = z ^ (z >> _S27)
        z = z * _C2
        return z ^ (z >> _S31)


def _as_u64(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, np.ndarray):
        return np.uint64(int(x) & _M64)
    return np.asarray(x).astype(np.uint64)


def stream_keys(seed, streams):
    """Per-stream 64-bit keys derived from (seed, stream)."""
    with np.errstate(over="ignore"):
        k = _mix64(_as_u64(seed) * _GOLDEN + _GOLDEN)
        return _mix64(k ^ (_as_u64(streams) * _GOLDEN))


def uniform_from_keys(keys, counter):
    """Doubles in [0, 1) for draw number ``counter`` of each keyed stream."""
    with np.errstate(over="ignore"):
        z = _mix64(keys + (_as_u64(counter) + np.uint64(1)) * _GOLDEN)
    return (z >> _S11).astype(np.float64) * _INV53


def uniform(seed, streams, counter):
    return uniform_from_keys(stream_keys(seed, streams), counter)


class CounterRNG:
    """Convenience wrapper holding a seed and handing out per-stream draws."""

    def __init__(self, seed):
        self.seed = int(seed) & _M64

    def keys(self, streams):
        return stream_keys(self.seed, streams)

    def uniform(self, streams, counter):
        return uniform(self.seed, streams, counter)
