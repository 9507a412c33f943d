"""Geometry of the discrete torus (Z/nZ)^d with its L1 graph metric.

Vertices are identified by their flat row-major index; coordinates are derived.
"""
from __future__ import annotations

import math
import sys
from collections import deque
from dataclasses import dataclass
from itertools import accumulate
from typing import Sequence

import numpy as np

INT64_MAX = np.iinfo(np.int64).max


class ResourceGuardError(RuntimeError):
    """An instance is too large for the requested computation."""


def checked_int64(value: int) -> int:
    """Return ``value`` unchanged if it fits a signed 64-bit slot, else raise."""
    if not -INT64_MAX - 1 <= value <= INT64_MAX:
        raise OverflowError(f"count {value} does not fit in int64")
    return value


@dataclass(frozen=True)
class TorusSpec:
    d: int
    n: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"side length must be a positive integer, got {self.n!r}")
        if self.n ** self.d > sys.maxsize:
            raise ResourceGuardError(
                f"n^d = {self.n}^{self.d} exceeds the addressable index range"
            )

    @property
    def volume(self) -> int:
        return self.n ** self.d

    @property
    def strides(self) -> tuple[int, ...]:
        return tuple(self.n ** (self.d - 1 - i) for i in range(self.d))

    @property
    def diameter(self) -> int:
        return self.d * (self.n // 2)

    def index(self, coords: Sequence[int]) -> int:
        if len(coords) != self.d:
            raise ValueError(f"expected {self.d} coordinates, got {len(coords)}")
        flat = 0
        for c in coords:
            if not 0 <= c < self.n:
                raise ValueError(f"coordinate {c} outside [0, {self.n - 1}]")
            flat = flat * self.n + int(c)
        return flat

    def coords(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.volume:
            raise ValueError(f"vertex index {index} outside [0, {self.volume - 1}]")
        out = []
        for _ in range(self.d):
            index, c = divmod(index, self.n)
            out.append(c)
        return tuple(reversed(out))

    def coords_array(self, indices: np.ndarray) -> np.ndarray:
        """Vectorised ``coords``: shape (len(indices), d)."""
        indices = np.asarray(indices, dtype=np.int64)
        return np.stack([(indices // s) % self.n for s in self.strides], axis=-1)

    def index_array(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64) % self.n
        flat = np.zeros(coords.shape[:-1], dtype=np.int64)
        for i in range(self.d):
            flat = flat * self.n + coords[..., i]
        return flat


def _as_coords(v, spec: TorusSpec) -> tuple[int, ...]:
    if isinstance(v, (int, np.integer)):
        return spec.coords(int(v))
    coords = tuple(int(c) for c in v)
    spec.index(coords)  # validates
    return coords


def l1_torus_distance(a, b, spec: TorusSpec) -> int:
    """Graph distance on the torus; ``a`` and ``b`` are coordinates or flat indices."""
    a, b = _as_coords(a, spec), _as_coords(b, spec)
    total = 0
    for ai, bi in zip(a, b):
        delta = abs(ai - bi)
        total += min(delta, spec.n - delta)
    return total


def distance_array(v: int, spec: TorusSpec) -> np.ndarray:
    """Distances from flat vertex ``v`` to every vertex, as a flat int64 array."""
    idx = np.arange(spec.volume, dtype=np.int64)
    out = np.zeros(spec.volume, dtype=np.int64)
    for s, c in zip(spec.strides, spec.coords(v)):
        delta = np.abs((idx // s) % spec.n - c)
        out += np.minimum(delta, spec.n - delta)
    return out


def ball_volume_zd(d: int, r: int) -> int:
    """Number of points of Z^d with L1 norm at most r (exact).

    Uses sum_k 2^k C(d, k) C(r, k): choose the k nonzero axes, their signs, and a
    composition of at most r into k positive parts.
    """
    if d < 1 or r < 0:
        raise ValueError(f"need d >= 1 and r >= 0, got d={d}, r={r}")
    return sum(2 ** k * math.comb(d, k) * math.comb(r, k) for k in range(min(d, r) + 1))


def ball_volume_zd_recurrence(d: int, r: int) -> int:
    """Same count via V(d, r) = V(d-1, r) + 2 * sum_{j=1..r} V(d-1, r-j)."""
    if d < 1 or r < 0:
        raise ValueError(f"need d >= 1 and r >= 0, got d={d}, r={r}")
    row = [2 * j + 1 for j in range(r + 1)]
    for _ in range(d - 1):
        prefix = list(accumulate(row, initial=0))
        # sum_{j=1..s} V(d-1, s-j) = sum_{i=0..s-1} row[i]
        row = [row[s] + 2 * prefix[s] for s in range(r + 1)]
    return int(row[r])


def _axis_distance_counts(n: int) -> np.ndarray:
    """counts[j] = #{x in Z/nZ : min(x, n - x) = j}."""
    counts = np.full(n // 2 + 1, 2, dtype=object)
    counts[0] = 1
    if n % 2 == 0:
        counts[-1] = 1
    return counts


def ball_volume_torus(spec: TorusSpec, r: int) -> int:
    """Exact cardinality of a closed ball of radius r in the torus.

    The per-axis distance distribution is convolved d times, so this is exact for
    every r, including radii where the ball wraps onto itself.
    """
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    if r >= spec.diameter:
        return spec.volume
    if 2 * r < spec.n:
        return ball_volume_zd(spec.d, r)
    axis = _axis_distance_counts(spec.n)
    dist = np.array([1], dtype=object)
    for _ in range(spec.d):
        dist = np.convolve(dist, axis)
    return int(sum(dist[: r + 1]))


def ball_volume_torus_bfs(spec: TorusSpec, r: int) -> int:
    """Reference count of the ball by breadth-first search from vertex 0."""
    seen = {0}
    queue = deque([(0, 0)])
    while queue:
        v, dist = queue.popleft()
        if dist == r:
            continue
        for w in neighbors(v, spec):
            if w not in seen:
                seen.add(w)
                queue.append((w, dist + 1))
    return len(seen)


def neighbors(v, spec: TorusSpec) -> list[int]:
    """Flat indices at distance one from ``v`` (deduplicated for n <= 2)."""
    coords = _as_coords(v, spec)
    base = spec.index(coords)
    out = []
    for s, c in zip(spec.strides, coords):
        for step in (-1, 1):
            w = base + (((c + step) % spec.n) - c) * s
            if w != base and w not in out:
                out.append(w)
    return out


def neighbor_array(vertices: np.ndarray, spec: TorusSpec) -> np.ndarray:
    """All 2d neighbours of each flat vertex, concatenated (duplicates possible for n <= 2)."""
    vertices = np.asarray(vertices, dtype=np.int64)
    n = spec.n
    parts = []
    for s in spec.strides:
        c = (vertices // s) % n
        parts.append(np.where(c == n - 1, vertices - (n - 1) * s, vertices + s))
        parts.append(np.where(c == 0, vertices + (n - 1) * s, vertices - s))
    return np.concatenate(parts)


def ball_offsets(d: int, r: int) -> np.ndarray:
    """Integer vectors of L1 norm <= r, shape (ball_volume_zd(d, r), d)."""
    pts = np.zeros((1, 0), dtype=np.int64)
    for axis in range(d):
        remaining = r - (np.abs(pts).sum(axis=1) if axis else np.zeros(1, dtype=np.int64))
        chunks = []
        for x in range(-r, r + 1):
            keep = pts[remaining >= abs(x)]
            chunks.append(np.hstack([keep, np.full((len(keep), 1), x, dtype=np.int64)]))
        pts = np.vstack(chunks)
    return pts


def ball_indices(center: int, r: int, spec: TorusSpec, offsets: np.ndarray | None = None) -> np.ndarray:
    """Flat indices of the closed torus ball B(center, r) (unique, unsorted order not guaranteed)."""
    if offsets is None:
        offsets = ball_offsets(spec.d, min(r, spec.diameter))
    pts = offsets + np.asarray(spec.coords(center), dtype=np.int64)
    flat = spec.index_array(pts)
    if 2 * r >= spec.n:
        flat = np.unique(flat)
    return flat
