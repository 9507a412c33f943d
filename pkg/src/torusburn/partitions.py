"""Nested dyadic box partitions of the torus with controlled diameter and size.

Boxes of [0, n-1]^d are split recursively: each side of length L becomes
[a, a + ceil(L/2) - 1] and [a + ceil(L/2), b]. At depth k every side lies in
[2^(m-k), 2^(m-k+1)] with m = floor(log2 n). Generations h+1, ..., h+l of this
2^d-ary tree, projected to the torus, give partitions whose cells at level k
have diameter <= C r_k and size in [r_k^d, C r_k^d], with r_k = eps n^{d/(d+1)} 2^-k
and C = 8^d.

Splitting acts on each axis independently, so the boxes at a given depth are
the Cartesian product of one list of intervals per axis (the same list for every
axis). Verification can therefore run on that one-dimensional factor, which is
exact, or on the materialised cells when they fit in memory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .torus import ResourceGuardError, TorusSpec

MAX_EXPLICIT_CELLS = 1 << 21
MAX_EXPLICIT_VERTICES = 1 << 24


class PartitionRegimeError(ValueError):
    """(n, eps) outside the range where the construction applies."""


def tree_height(n: int) -> int:
    return n.bit_length() - 1


def split_interval(a: int, b: int) -> list[tuple[int, int]]:
    half = (b - a + 2) // 2  # ceil(L / 2)
    return [(a, a + half - 1), (a + half, b)]


@dataclass(frozen=True)
class BoxNode:
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    depth: int
    height: int

    @property
    def sides(self) -> tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @property
    def cardinality(self) -> int:
        return math.prod(self.sides)

    @property
    def diameter(self) -> int:
        return sum(s - 1 for s in self.sides)

    def children(self) -> list["BoxNode"]:
        if self.depth >= self.height:
            return []
        per_axis = [split_interval(a, b) for a, b in zip(self.lo, self.hi)]
        out = []
        for choice in np.ndindex(*([2] * len(self.lo))):
            parts = [per_axis[i][c] for i, c in enumerate(choice)]
            out.append(
                BoxNode(
                    lo=tuple(p[0] for p in parts),
                    hi=tuple(p[1] for p in parts),
                    depth=self.depth + 1,
                    height=self.height,
                )
            )
        return out


def build_dyadic_tree(spec: TorusSpec) -> BoxNode:
    """Root box [0, n-1]^d; children are generated on demand down to depth floor(log2 n)."""
    if spec.n < 2:
        raise ValueError("need n >= 2")
    return BoxNode(lo=(0,) * spec.d, hi=(spec.n - 1,) * spec.d, depth=0, height=tree_height(spec.n))


def axis_intervals(n: int, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """(lo, hi) of the 2^depth intervals of [0, n-1] at the given depth, left to right."""
    if not 0 <= depth <= tree_height(n):
        raise ValueError(f"depth {depth} outside [0, {tree_height(n)}]")
    lo = np.array([0], dtype=np.int64)
    hi = np.array([n - 1], dtype=np.int64)
    for _ in range(depth):
        half = (hi - lo + 2) // 2
        lo = np.column_stack([lo, lo + half]).ravel()
        hi = np.column_stack([lo[0::2] + half - 1, hi]).ravel()
    return lo, hi


@dataclass
class CellLevel:
    """Cells of one generation as boxes: ``lo``/``hi`` have shape (cells, d).

    ``parent[j]`` indexes the enclosing cell of the previous generation (-1 at the top).
    """

    k: int
    depth: int
    radius: float
    lo: np.ndarray
    hi: np.ndarray
    parent: np.ndarray


@dataclass
class NestedPartition:
    spec: TorusSpec
    epsilon: float
    h: int
    ell: int
    height: int
    radii: list[float]
    C: float
    axis_levels: list[tuple[np.ndarray, np.ndarray]]
    _cells: dict[int, CellLevel] = field(default_factory=dict, repr=False)

    def depth(self, k: int) -> int:
        return self.h + k

    def cell_count(self, k: int) -> int:
        return len(self.axis_levels[k - 1][0]) ** self.spec.d

    def explicit_feasible(self) -> bool:
        return (
            self.spec.volume <= MAX_EXPLICIT_VERTICES
            and sum(self.cell_count(k) for k in range(1, self.ell + 1)) <= MAX_EXPLICIT_CELLS
        )

    def cells(self, k: int) -> CellLevel:
        """Materialise level k (1 <= k <= ell) as explicit boxes."""
        if not 1 <= k <= self.ell:
            raise ValueError(f"level {k} outside [1, {self.ell}]")
        if k not in self._cells:
            if self.cell_count(k) > MAX_EXPLICIT_CELLS:
                raise ResourceGuardError(f"level {k} has {self.cell_count(k)} cells")
            d = self.spec.d
            alo, ahi = self.axis_levels[k - 1]
            per_axis = len(alo)
            idx = np.indices((per_axis,) * d).reshape(d, -1).T
            if k == 1:
                parent = np.full(len(idx), -1, dtype=np.int64)
            else:
                width = per_axis // 2
                parent = np.zeros(len(idx), dtype=np.int64)
                for i in range(d):
                    parent = parent * width + idx[:, i] // 2
            self._cells[k] = CellLevel(
                k=k, depth=self.depth(k), radius=self.radii[k - 1],
                lo=alo[idx], hi=ahi[idx], parent=parent,
            )
        return self._cells[k]


def _largest_h(n: int, d: int, eps: Fraction) -> int:
    # largest integer h with 2^h <= n^{1/(d+1)} / (2 eps), i.e. (2^(h+1) eps)^(d+1) <= n
    h = math.floor(math.log2(n ** (1 / (d + 1)) / (2 * float(eps))))
    while (Fraction(2) ** (h + 1) * eps) ** (d + 1) > n:
        h -= 1
    while (Fraction(2) ** (h + 2) * eps) ** (d + 1) <= n:
        h += 1
    return h


def _largest_ell(n: int, d: int, eps: Fraction) -> int:
    # largest integer l with 2^(3l/2) <= eps n^{d/(d+1)}, i.e. 2^(3l(d+1)) <= eps^(2(d+1)) n^(2d)
    rhs = eps ** (2 * (d + 1)) * Fraction(n) ** (2 * d)
    ell = math.floor(2 / 3 * math.log2(float(eps) * n ** (d / (d + 1))))
    while Fraction(2) ** (3 * ell * (d + 1)) > rhs:
        ell -= 1
    while Fraction(2) ** (3 * (ell + 1) * (d + 1)) <= rhs:
        ell += 1
    return ell


def partition_parameters(spec: TorusSpec, epsilon: float) -> tuple[int, int, int]:
    """(h, ell, m), raising PartitionRegimeError if h >= 0, ell >= 1, h + ell <= m fails."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if spec.n < 2:
        raise PartitionRegimeError("need n >= 2")
    eps = Fraction(epsilon)
    d, n = spec.d, spec.n
    m = tree_height(n)
    h = _largest_h(n, d, eps)
    ell = _largest_ell(n, d, eps)
    if h < 0:
        raise PartitionRegimeError(
            f"h = floor(log2(n^(1/(d+1)) / (2 eps))) = {h} < 0 for n={n}, d={d}, eps={epsilon}"
        )
    if ell < 1:
        raise PartitionRegimeError(
            f"l = floor(2/3 log2(eps n^(d/(d+1)))) = {ell} < 1 for n={n}, d={d}, eps={epsilon}"
        )
    if h + ell > m:
        raise PartitionRegimeError(
            f"h + l = {h} + {ell} > m = floor(log2 n) = {m} for n={n}, d={d}, eps={epsilon}"
        )
    return h, ell, m


def build_nested_partition(spec: TorusSpec, epsilon: float) -> NestedPartition:
    h, ell, m = partition_parameters(spec, epsilon)
    scale = epsilon * spec.n ** (spec.d / (spec.d + 1))
    radii = [scale * 2.0 ** -k for k in range(1, ell + 1)]
    axis_levels = [axis_intervals(spec.n, h + k) for k in range(1, ell + 1)]
    return NestedPartition(
        spec=spec, epsilon=epsilon, h=h, ell=ell, height=m, radii=radii,
        C=8.0 ** spec.d, axis_levels=axis_levels,
    )


@dataclass
class PartitionReport:
    mode: str
    levels: int
    max_diameter_ratio: float = 0.0
    min_cardinality_ratio: float = math.inf
    max_cardinality_ratio: float = 0.0
    max_children: int = 0
    children_bound: float = 0.0
    partition_violations: int = 0
    nesting_violations: int = 0
    diameter_violations: int = 0
    cardinality_violations: int = 0
    children_violations: int = 0

    @property
    def violations(self) -> int:
        return (
            self.partition_violations + self.nesting_violations + self.diameter_violations
            + self.cardinality_violations + self.children_violations
        )

    @property
    def ok(self) -> bool:
        return self.violations == 0


_REL = 1e-12


def _size_checks(report: PartitionReport, sides: np.ndarray, r: float, C: float, d: int) -> None:
    """Diameter and cardinality bounds; ``sides`` has shape (cells, d)."""
    diam = (sides - 1).sum(axis=1)
    card = np.prod(sides.astype(float), axis=1)
    report.max_diameter_ratio = max(report.max_diameter_ratio, float(diam.max()) / (C * r))
    report.min_cardinality_ratio = min(report.min_cardinality_ratio, float(card.min()) / r ** d)
    report.max_cardinality_ratio = max(report.max_cardinality_ratio, float(card.max()) / (C * r ** d))
    report.diameter_violations += int(np.count_nonzero(diam > C * r * (1 + _REL)))
    report.cardinality_violations += int(
        np.count_nonzero(card < r ** d * (1 - _REL)) + np.count_nonzero(card > C * r ** d * (1 + _REL))
    )


def _verify_factorized(part: NestedPartition) -> PartitionReport:
    d, n, C = part.spec.d, part.spec.n, part.C
    report = PartitionReport(mode="factorized", levels=part.ell, children_bound=C * 2 ** d)
    prev = None
    for k, (lo, hi) in enumerate(part.axis_levels, start=1):
        # one-dimensional partition of [0, n-1] into consecutive nonempty intervals
        bad = int(lo[0] != 0) + int(hi[-1] != n - 1)
        bad += int(np.count_nonzero(hi < lo)) + int(np.count_nonzero(lo[1:] != hi[:-1] + 1))
        report.partition_violations += bad
        side = hi - lo + 1
        # extreme boxes are products of extreme sides
        extremes = np.array([[side.min()] * d, [side.max()] * d])
        _size_checks(report, extremes, part.radii[k - 1], C, d)
        if prev is not None:
            plo, phi = prev
            parent = np.arange(len(lo)) // 2
            outside = (lo < plo[parent]) | (hi > phi[parent])
            report.nesting_violations += int(np.count_nonzero(outside))
            per_parent = np.bincount(parent, minlength=len(plo))
            kids = int(per_parent.max()) ** d
            report.max_children = max(report.max_children, kids)
            report.children_violations += int(kids > C * 2 ** d)
        prev = (lo, hi)
    return report


def _coverage(lo: np.ndarray, hi: np.ndarray, n: int) -> np.ndarray:
    """Number of boxes covering each vertex of [0, n-1]^d, via a d-dimensional difference array."""
    d = lo.shape[1]
    diff = np.zeros((n + 1,) * d, dtype=np.int32)
    for corner in np.ndindex(*([2] * d)):
        sign = (-1) ** sum(corner)
        pt = np.where(np.array(corner, dtype=bool), hi + 1, lo)
        np.add.at(diff, tuple(pt.T), sign)
    for axis in range(d):
        np.cumsum(diff, axis=axis, out=diff)
    return diff[(slice(0, n),) * d]


def _verify_explicit(part: NestedPartition) -> PartitionReport:
    d, n, C = part.spec.d, part.spec.n, part.C
    report = PartitionReport(mode="explicit", levels=part.ell, children_bound=C * 2 ** d)
    prev: Optional[CellLevel] = None
    for k in range(1, part.ell + 1):
        level = part.cells(k)
        cover = _coverage(level.lo, level.hi, n)
        report.partition_violations += int(np.count_nonzero(cover != 1))
        _size_checks(report, level.hi - level.lo + 1, level.radius, C, d)
        if prev is not None:
            plo, phi = prev.lo[level.parent], prev.hi[level.parent]
            outside = np.any((level.lo < plo) | (level.hi > phi), axis=1)
            report.nesting_violations += int(np.count_nonzero(outside))
            kids = np.bincount(level.parent, minlength=len(prev.lo))
            report.max_children = max(report.max_children, int(kids.max()))
            report.children_violations += int(np.count_nonzero(kids > C * 2 ** d))
        prev = level
    return report


def verify_partition(part: NestedPartition, mode: str = "auto") -> PartitionReport:
    """Check partition, nesting, diameter, cardinality and child-count bounds.

    ``mode`` is "explicit" (materialised cells, vertex coverage painted), "factorized"
    (the per-axis intervals), or "auto" (explicit when it fits in memory).
    """
    if mode == "auto":
        mode = "explicit" if part.explicit_feasible() or part._cells else "factorized"
    if mode == "explicit":
        return _verify_explicit(part)
    if mode == "factorized":
        return _verify_factorized(part)
    raise ValueError(f"unknown mode {mode!r}")


SWEEP_DIMENSIONS = (1, 2, 3)
SWEEP_EXPONENTS = tuple(range(10, 21))
SWEEP_EPSILONS = (0.25, 0.5, 1.0)


def sweep(dimensions=SWEEP_DIMENSIONS, exponents=SWEEP_EXPONENTS, epsilons=SWEEP_EPSILONS):
    """Verify every regime-valid (d, n = 2^e, eps); yields (d, n, eps, report or error text)."""
    for d in dimensions:
        for e in exponents:
            for eps in epsilons:
                spec = TorusSpec(d, 2 ** e)
                try:
                    part = build_nested_partition(spec, eps)
                except PartitionRegimeError as exc:
                    yield d, spec.n, eps, str(exc)
                    continue
                yield d, spec.n, eps, verify_partition(part)
