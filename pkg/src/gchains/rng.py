"""Counter-based uniforms keyed by ``(seed, stream, replica, step)``.

Every draw is a pure function of its key, so replicas can run in any order
or in parallel and still reproduce bit for bit.  The mixer is splitmix64.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = z + _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _key(seed: int, stream: int) -> np.uint64:
    with np.errstate(over="ignore"):
        h = _mix(np.array([seed & _MASK], dtype=np.uint64))
        h = _mix(h ^ np.uint64(stream & _MASK))
    return h[0]


def uniforms(seed: int, stream: int, replicas, steps) -> np.ndarray:
    """Array of shape ``(len(replicas), len(steps))`` of uniforms in [0, 1)."""
    r = np.asarray(replicas, dtype=np.uint64).reshape(-1, 1)
    s = np.asarray(steps, dtype=np.uint64).reshape(1, -1)
    with np.errstate(over="ignore"):
        h = _mix(_key(seed, stream) ^ r)
        h = _mix(h ^ s)
    # top 53 bits -> double in [0, 1)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def replica_uniforms(seed: int, stream: int, replica: int, start: int, count: int) -> np.ndarray:
    return uniforms(seed, stream, [replica], np.arange(start, start + count))[0]
