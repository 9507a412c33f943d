"""Counter-based randomness: every entry X(i, h) is a pure function of (seed, i, h).

The coupling of burning processes revisits the same uniform draw X_i^h from
several levels, so the table is never stored; entries are recomputed on demand by
hashing the counter with a SplitMix64-style finaliser.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STEP_KEY = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TO_UNIT = 2.0 ** -53


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class RandomnessTable:
    """Uniform vertices X(i, h) on a torus with ``volume`` vertices.

    ``i >= 1`` is the step index and ``h >= 1`` the attempt index. Attempt ``h = 0``
    is a separate stream reserved for samplers that draw from the unburned set
    directly instead of by rejection.
    """

    seed: int
    volume: int

    def __post_init__(self):
        if self.volume < 1:
            raise ValueError("volume must be positive")
        object.__setattr__(self, "seed", int(self.seed) & _MASK)

    @property
    def _key(self) -> int:
        return _mix(self.seed + _GOLDEN)

    def _row_key(self, i: int) -> int:
        return _mix(self._key ^ ((i * _STEP_KEY) & _MASK))

    def bits(self, i: int, h: int) -> int:
        return _mix(self._row_key(i) + h * _GOLDEN)

    def uniform(self, i: int, h: int) -> float:
        return (self.bits(i, h) >> 11) * _TO_UNIT

    def vertex(self, i: int, h: int) -> int:
        return int(self.uniform(i, h) * self.volume)

    def vertices(self, i: int, h_start: int, count: int) -> np.ndarray:
        """X(i, h) for h = h_start, ..., h_start + count - 1 as an int64 array."""
        h = np.arange(h_start, h_start + count, dtype=np.uint64)
        z = _mix_array(np.uint64(self._row_key(i)) + h * np.uint64(_GOLDEN))
        u = (z >> np.uint64(11)).astype(np.float64) * _TO_UNIT
        return (u * self.volume).astype(np.int64)

    def first_outside(self, i: int, burned: np.ndarray, batch: int = 32) -> tuple[int, int]:
        """Smallest attempt h with X(i, h) not in ``burned`` (a boolean mask).

        Returns (h, X(i, h)). Raises ValueError if the mask is full, since the
        infimum would be infinite.
        """
        if burned.all():
            raise ValueError("every vertex is burned; no attempt can succeed")
        h = 1
        while True:
            xs = self.vertices(i, h, batch)
            hits = np.flatnonzero(~burned[xs])
            if hits.size:
                j = int(hits[0])
                return h + j, int(xs[j])
            h += batch
            batch = min(batch * 2, 1 << 16)
