"""Counter-based random streams.

Every random draw in this package is a pure function of
``(seed, stream, position)``.  This makes sampling reproducible independent
of evaluation order and of how work is split across workers: stream ``s``
always sees the same numbers, whether it is drawn alone or as part of a
vectorized batch.

The mixer is the splitmix64 finalizer applied three times, chaining seed,
stream and position.  It passes the usual avalanche sanity checks and is
trivially vectorizable with numpy's wrapping uint64 arithmetic.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_DOUBLE_SCALE = 1.0 / (1 << 53)


def _mix(z):
    with np.errstate(over="ignore"):
        z = np.asarray(z, dtype=np.uint64) + _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def counter_uniforms(seed, streams, positions):
    """Uniforms in [0, 1) indexed by (seed, stream, position).

    ``streams`` and ``positions`` are broadcast against each other, so
    ``counter_uniforms(s, streams[:, None], positions[None, :])`` fills a
    whole sample block in one call.
    """
    seed_key = _mix(np.uint64(np.int64(seed).view(np.uint64) if seed < 0 else seed))
    s = np.asarray(streams, dtype=np.uint64)
    p = np.asarray(positions, dtype=np.uint64)
    z = _mix(_mix(seed_key ^ s) ^ p)
    return (z >> np.uint64(11)).astype(np.float64) * _DOUBLE_SCALE


def uniform_block(seed, stream_start, stream_count, length):
    """A (stream_count, length) block of uniforms for consecutive streams."""
    streams = np.arange(stream_start, stream_start + stream_count, dtype=np.uint64)
    positions = np.arange(length, dtype=np.uint64)
    return counter_uniforms(seed, streams[:, None], positions[None, :])
