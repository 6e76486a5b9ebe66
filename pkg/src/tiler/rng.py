"""Counter-based splittable random numbers.

Every Monte-Carlo trial draws from its own splitmix64 stream keyed by
(seed, trial index), so trial t sees the same draw sequence no matter how
trials are batched, ordered, or split across processes.  The scalar path
uses plain Python ints masked to 64 bits; the vectorized path walks the
same uint64 state chain, which keeps the compiled and pure-numpy walk
kernels bit-for-bit in agreement.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK = 0xFFFFFFFFFFFFFFFF
INV53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z = ((z ^ (z >> 30)) * MIX1) & MASK
    z = ((z ^ (z >> 27)) * MIX2) & MASK
    return z ^ (z >> 31)


def trial_state(seed: int, trial: int) -> int:
    """Initial stream state for a (seed, trial) pair.

    Two finalizer rounds decorrelate nearby (seed, trial) keys.
    """
    s = seed & MASK
    t = trial & MASK
    return mix64(mix64((t * GAMMA + GAMMA) & MASK) ^ s)


def next_state(state: int) -> int:
    return (state + GAMMA) & MASK


def state_u01(state: int) -> float:
    """Uniform in [0, 1) derived from an already-advanced state."""
    return (mix64(state) >> 11) * INV53


class Stream:
    """Sequential view of one trial's stream, for single-step sampling.

    >>> s = Stream(7, 0)
    >>> a = s.u01(); b = s.u01()
    >>> Stream(7, 0).u01() == a
    True
    """

    def __init__(self, seed: int, trial: int = 0):
        self.seed = int(seed)
        self.trial = int(trial)
        self._state = trial_state(self.seed, self.trial)

    def u01(self) -> float:
        self._state = next_state(self._state)
        return state_u01(self._state)

    def below(self, n: int) -> int:
        """Integer uniform on [0, n)."""
        return min(int(self.u01() * n), n - 1)


# ------------------------------------------------- vectorized counterparts

_G = np.uint64(GAMMA)
_M1 = np.uint64(MIX1)
_M2 = np.uint64(MIX2)


def mix64_vec(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array; wraparound is intentional."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def trial_state_vec(seed: int, trials: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        t = trials.astype(np.uint64)
        s = np.uint64(seed & MASK)
        return mix64_vec(mix64_vec(t * _G + _G) ^ s)


def next_state_vec(states: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return states + _G


def state_u01_vec(states: np.ndarray) -> np.ndarray:
    return (mix64_vec(states) >> np.uint64(11)) * INV53
