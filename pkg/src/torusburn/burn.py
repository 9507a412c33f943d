"""The burning process on the torus and the deterministic burning-number bounds.

After k steps with ignitions x_1, ..., x_k the burned set is the union of the
closed balls B(x_i, k - i). The engine grows it one layer per step from the
frontier (vertices burned at the previous step) and then adds the new ignition,
so the total work of a full run is proportional to n^d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .torus import (
    ResourceGuardError,
    TorusSpec,
    ball_indices,
    ball_offsets,
    ball_volume_torus,
    ball_volume_zd,
    distance_array,
    neighbor_array,
)

UNBURNED = -1


class UnburnedIndex:
    """Position-tracked swap-remove array over the unburned vertices.

    ``items[:count]`` lists the unburned vertices in arbitrary order and
    ``pos[v]`` is the slot of v (or -1 once removed), giving O(1) uniform
    sampling and O(1) deletion.
    """

    def __init__(self, volume: int):
        self.items = np.arange(volume, dtype=np.int64)
        self.pos = np.arange(volume, dtype=np.int64)
        self.count = volume

    def __len__(self) -> int:
        return self.count

    def __contains__(self, v: int) -> bool:
        return self.pos[v] >= 0

    def sample(self, u: float) -> int:
        """The unburned vertex selected by a uniform variate u in [0, 1)."""
        if self.count == 0:
            raise IndexError("sample from an empty index")
        return int(self.items[int(u * self.count)])

    def remove(self, v: int) -> None:
        p = self.pos[v]
        if p < 0:
            return
        last = self.items[self.count - 1]
        self.items[p] = last
        self.pos[last] = p
        self.pos[v] = -1
        self.count -= 1

    def remove_many(self, vs: np.ndarray) -> None:
        """Remove distinct, currently present vertices ``vs`` in one vectorised pass."""
        m = len(vs)
        if m == 0:
            return
        if m == 1:
            self.remove(int(vs[0]))
            return
        new_count = self.count - m
        slots = self.pos[vs]
        self.pos[vs] = -1
        # Vertices sitting in the tail that survive fill the holes left in the head.
        tail = self.items[new_count:self.count]
        movers = tail[self.pos[tail] >= 0]
        holes = slots[slots < new_count]
        self.items[holes] = movers
        self.pos[movers] = holes
        self.count = new_count

    def members(self) -> np.ndarray:
        return self.items[: self.count]


class BurnState:
    """Mutable state of one burning process; ``step`` advances it in place."""

    def __init__(self, spec: TorusSpec, track_unburned: bool = True):
        self.spec = spec
        self.k = 0
        self.burned = np.zeros(spec.volume, dtype=bool)
        self.burn_time = np.full(spec.volume, UNBURNED, dtype=np.int32)
        self.frontier = np.empty(0, dtype=np.int64)
        self.unburned_count = spec.volume
        self.unburned_index = UnburnedIndex(spec.volume) if track_unburned else None

    @property
    def full(self) -> bool:
        return self.unburned_count == 0

    def step(self, ignition: Optional[int] = None) -> "BurnState":
        """Burned_{k+1} = (Burned_k dilated by one layer) with the ignition added."""
        if ignition is not None and not 0 <= ignition < self.spec.volume:
            raise ValueError(f"ignition {ignition} outside [0, {self.spec.volume - 1}]")
        k1 = self.k + 1
        if self.frontier.size:
            cand = neighbor_array(self.frontier, self.spec)
            cand = cand[~self.burned[cand]]
            new = np.unique(cand) if cand.size > 1 else cand
        else:
            new = self.frontier
        if ignition is not None and not self.burned[ignition]:
            if new.size == 0 or not np.any(new == ignition):
                new = np.append(new, np.int64(ignition))
        if new.size:
            self.burned[new] = True
            self.burn_time[new] = k1
            self.unburned_count -= int(new.size)
            if self.unburned_index is not None:
                self.unburned_index.remove_many(new)
        self.frontier = new
        self.k = k1
        return self

    def burned_set(self) -> set[int]:
        return set(np.flatnonzero(self.burned).tolist())


@dataclass
class BurnTrace:
    spec: TorusSpec
    tau: Optional[int]
    unburned_per_step: np.ndarray
    burn_time: np.ndarray
    ignitions: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.unburned_per_step) - 1

    def unburned_fraction(self, k) -> np.ndarray:
        """Unburned fraction at step(s) k; steps past the end reuse the last value."""
        k = np.minimum(np.asarray(k, dtype=np.int64), self.steps)
        return self.unburned_per_step[k] / self.spec.volume


def run_ignitions(spec: TorusSpec, ignitions: Iterable[int], steps: Optional[int] = None) -> BurnState:
    """Drive a fresh state through the given ignitions (then idle steps up to ``steps``)."""
    state = BurnState(spec, track_unburned=False)
    ign = list(ignitions)
    total = len(ign) if steps is None else steps
    for k in range(total):
        state.step(ign[k] if k < len(ign) else None)
    return state


def burned_oracle(ignitions: Sequence[int], k: int, spec: TorusSpec) -> set[int]:
    """Literal union of the balls B(x_i, k - i) for i <= min(k, len(ignitions))."""
    out: set[int] = set()
    for i, x in enumerate(ignitions[:k], start=1):
        radius = k - i
        dist = distance_array(int(x), spec)
        out.update(np.flatnonzero(dist <= radius).tolist())
    return out


def bound_constants(d: int) -> tuple[float, float]:
    """(alpha_d, gamma_d): lower and upper constants for b(T_n^d) / n^{d/(d+1)}."""
    if d < 1:
        raise ValueError("d must be >= 1")
    fact = math.factorial(d + 1)
    alpha = (fact / 2 ** d) ** (1 / (d + 1))
    gamma = ((1 + 1 / d) ** d * fact) ** (1 / (d + 1))
    return alpha, gamma


def kappa_lower_bound(spec: TorusSpec) -> int:
    """Least k with sum_{j<k} |B(0, j)| >= n^d; every burning sequence needs k >= this."""
    total, k = 0, 0
    target = spec.volume
    while total < target:
        total += ball_volume_torus(spec, k)
        k += 1
    return k


def optimal_radius(spec: TorusSpec) -> int:
    """k_n(c) = floor((c n^d)^{1/(d+1)}) at the cover-optimal c = d! * d."""
    c = math.factorial(spec.d) * spec.d
    return _integer_root(c * spec.volume, spec.d + 1)


def _integer_root(x: int, k: int) -> int:
    r = int(round(x ** (1.0 / k)))
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


@dataclass
class CoverSchedule:
    centers: list[int]
    radius: int
    bound: int


def greedy_cover_schedule(spec: TorusSpec, radius: int, max_vertices: int = 50_000_000) -> CoverSchedule:
    """Greedy packing-cover: scan vertices in index order, keep those farther than
    ``radius`` from every kept centre.

    The kept centres are pairwise more than ``radius`` apart, and maximality makes
    their radius-balls cover the torus. Burning them in order and then idling for
    ``radius`` steps burns everything, so len(centers) + radius bounds b(T_n^d).
    """
    if not 1 <= radius or 2 * radius >= spec.n:
        raise ValueError(f"radius must satisfy 1 <= radius < n/2, got {radius} for n={spec.n}")
    if spec.volume > max_vertices:
        raise ResourceGuardError(f"greedy cover over {spec.volume} vertices exceeds {max_vertices}")
    covered = np.zeros(spec.volume, dtype=bool)
    offsets = ball_offsets(spec.d, radius)
    centers: list[int] = []
    pos, window = 0, 1024
    volume = spec.volume
    while pos < volume:
        chunk = covered[pos:pos + window]
        free = np.flatnonzero(~chunk)
        if free.size == 0:
            pos += window
            window = min(window * 2, 1 << 20)
            continue
        v = pos + int(free[0])
        centers.append(v)
        covered[ball_indices(v, radius, spec, offsets)] = True
        pos, window = v + 1, 1024
    return CoverSchedule(centers=centers, radius=radius, bound=len(centers) + radius)


def best_greedy_bound(spec: TorusSpec, radii: Optional[Iterable[int]] = None) -> CoverSchedule:
    """Smallest greedy bound over ``radii`` (default: every admissible radius)."""
    if radii is None:
        radii = range(1, (spec.n - 1) // 2 + 1)
    best = None
    for r in radii:
        if not 1 <= r or 2 * r >= spec.n:
            continue
        sched = greedy_cover_schedule(spec, r)
        if best is None or sched.bound < best.bound:
            best = sched
    if best is None:
        raise ValueError(f"no admissible radius for n={spec.n}")
    return best


def radius_grid(spec: TorusSpec, spread: float = 0.2, points: int = 5) -> list[int]:
    """Radii around k_n(d! * d), within +-spread relative, clipped to [1, (n-1)/2].

    For small n the optimal radius can exceed half the side; clipping keeps the
    grid usable (the bound is still valid, only less tight).
    """
    r0 = optimal_radius(spec)
    rmax = (spec.n - 1) // 2
    if rmax < 1:
        return []
    return sorted({min(rmax, max(1, int(round(r0 * (1 + s))))) for s in np.linspace(-spread, spread, points)})


EXACT_MAX_VERTICES = 40


def exact_burning_number(spec: TorusSpec) -> int:
    """b(T_n^d) by exhaustive search; refuses instances with more than 40 vertices.

    The first ignition is fixed at the origin (vertex transitivity). Each search
    node picks the lowest uncovered vertex and branches over which unused radius
    covers it and from where, pruning when the remaining balls cannot cover the
    remaining vertices by volume.
    """
    if spec.volume > EXACT_MAX_VERTICES:
        raise ResourceGuardError(
            f"exact search refused: n^d = {spec.volume} > {EXACT_MAX_VERTICES}"
        )
    lower = kappa_lower_bound(spec)
    upper = spec.diameter + 1
    if spec.n >= 3:
        upper = min(upper, best_greedy_bound(spec).bound)
    for k in range(lower, upper + 1):
        if _burnable(spec.d, spec.n, k):
            return k
    return upper


@lru_cache(maxsize=None)
def _ball_masks(d: int, n: int) -> tuple[tuple[int, ...], ...]:
    """masks[r][v]: bitmask of B(v, r) for r = 0..diameter."""
    spec = TorusSpec(d, n)
    dists = [distance_array(v, spec) for v in range(spec.volume)]
    out = []
    for r in range(spec.diameter + 1):
        row = []
        for v in range(spec.volume):
            row.append(sum(1 << int(w) for w in np.flatnonzero(dists[v] <= r)))
        out.append(tuple(row))
    return tuple(out)


def _burnable(d: int, n: int, k: int) -> bool:
    spec = TorusSpec(d, n)
    volume = spec.volume
    full = (1 << volume) - 1
    masks = _ball_masks(d, n)
    top = spec.diameter
    vol = [ball_volume_torus(spec, min(r, top)) for r in range(k)]

    def ball(v: int, r: int) -> int:
        return masks[min(r, top)][v]

    failed: set[tuple[int, tuple[int, ...]]] = set()

    def search(covered: int, radii: tuple[int, ...]) -> bool:
        if covered == full:
            return True
        if not radii:
            return False
        key = (covered, radii)
        if key in failed:
            return False
        uncovered = full & ~covered
        if bin(uncovered).count("1") > sum(vol[r] for r in radii):
            failed.add(key)
            return False
        v = (uncovered & -uncovered).bit_length() - 1
        for idx, r in enumerate(radii):
            rest = radii[:idx] + radii[idx + 1:]
            reach = ball(v, r)
            while reach:
                low = reach & -reach
                c = low.bit_length() - 1
                reach ^= low
                if search(covered | ball(c, r), rest):
                    return True
        failed.add(key)
        return False

    return search(ball(0, k - 1), tuple(range(k - 2, -1, -1)))
