"""Random ignition laws and the rejection-sampling coupling.

All processes read their randomness from one ``RandomnessTable``:

* coupon collector: X_k = X(k, 1), uniform on the whole torus;
* rejection sampling (production): Y_{k+1} drawn from the unburned index with the
  variate U(k+1, 0), i.e. uniform on the complement of Burned_k;
* rejection sampling (literal): Y_{k+1} = X(k+1, H) with H the first attempt
  landing outside Burned_k;
* the coupled hierarchy B^0, B^1, ..., B^p and B^*, where level p+1 rejects
  attempts that land in B^p(k) and B^* rejects attempts that land in itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .burn import UNBURNED, BurnState, BurnTrace
from .rng import RandomnessTable
from .torus import ResourceGuardError, TorusSpec

COUPLED_MEMORY_BUDGET = 2 * 1024 ** 3


SIMULATION_MEMORY_BUDGET = 2 * 1024 ** 3
BYTES_PER_VERTEX = 1 + 4 + 16  # burned mask, burn times, unburned index and its inverse


def _check_driver_spec(spec: TorusSpec) -> None:
    if spec.n < 3 and spec.volume > 1:
        raise ValueError("Monte-Carlo drivers need n >= 3 (n = 1 is allowed as a trivial case)")
    if spec.volume * BYTES_PER_VERTEX > SIMULATION_MEMORY_BUDGET:
        raise ResourceGuardError(
            f"n^d = {spec.volume} vertices needs ~{spec.volume * BYTES_PER_VERTEX} bytes; "
            f"budget is {SIMULATION_MEMORY_BUDGET}"
        )


def _finish(state: BurnState, counts: list[int], ignitions: list[int], kind: str, seed: int) -> BurnTrace:
    return BurnTrace(
        spec=state.spec,
        tau=state.k if state.full else None,
        unburned_per_step=np.asarray(counts, dtype=np.int64),
        burn_time=state.burn_time,
        ignitions=np.asarray(ignitions, dtype=np.int64),
        meta={"process": kind, "seed": int(seed)},
    )


def run_coupon_collector(spec: TorusSpec, seed: int, max_steps: Optional[int] = None) -> BurnTrace:
    """Ignite an independent uniform vertex at every step until the torus is burned."""
    _check_driver_spec(spec)
    table = RandomnessTable(seed, spec.volume)
    state = BurnState(spec, track_unburned=False)
    counts, ignitions = [spec.volume], []
    while not state.full and (max_steps is None or state.k < max_steps):
        x = table.vertex(state.k + 1, 1)
        ignitions.append(x)
        state.step(x)
        counts.append(state.unburned_count)
    return _finish(state, counts, ignitions, "cc", seed)


def run_rejection_sampling(spec: TorusSpec, seed: int, max_steps: Optional[int] = None) -> BurnTrace:
    """Ignite a vertex uniform on the unburned set (sampled before the dilation)."""
    _check_driver_spec(spec)
    table = RandomnessTable(seed, spec.volume)
    state = BurnState(spec, track_unburned=True)
    counts, ignitions = [spec.volume], []
    while not state.full and (max_steps is None or state.k < max_steps):
        y = state.unburned_index.sample(table.uniform(state.k + 1, 0))
        ignitions.append(y)
        state.step(y)
        counts.append(state.unburned_count)
    return _finish(state, counts, ignitions, "rs", seed)


def run_rejection_sampling_literal(spec: TorusSpec, seed: int, max_steps: Optional[int] = None) -> BurnTrace:
    """Rejection sampling as a construction: walk attempts X(k+1, 1), X(k+1, 2), ...
    and ignite the first one that is not burned."""
    _check_driver_spec(spec)
    table = RandomnessTable(seed, spec.volume)
    state = BurnState(spec, track_unburned=False)
    counts, ignitions, attempts = [spec.volume], [], []
    while not state.full and (max_steps is None or state.k < max_steps):
        h, y = table.first_outside(state.k + 1, state.burned)
        attempts.append(h)
        ignitions.append(y)
        state.step(y)
        counts.append(state.unburned_count)
    trace = _finish(state, counts, ignitions, "literal-rs", seed)
    trace.meta["attempts"] = attempts
    return trace


@dataclass
class LevelTrace:
    """Trace of one level of the coupling.

    ``attempts[i-1]`` and ``ignitions[i-1]`` are the realised H_i and Y_i that drive
    this level. For B^p with p >= 1 they are H_i^p, Y_i^p; for B^0 there are none.
    """

    label: str
    unburned_per_step: np.ndarray
    burn_time: np.ndarray
    attempts: np.ndarray
    ignitions: np.ndarray
    tau: Optional[int]

    def unburned_fraction(self, k, volume: int) -> np.ndarray:
        k = np.minimum(np.asarray(k, dtype=np.int64), len(self.unburned_per_step) - 1)
        return self.unburned_per_step[k] / volume


@dataclass
class CoupledRun:
    spec: TorusSpec
    seed: int
    p_max: int
    horizon: int
    levels: list[LevelTrace]
    star: LevelTrace
    next_attempts: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def level(self, p: int) -> LevelTrace:
        return self.levels[p]

    def inclusion_violations(self) -> int:
        """Vertices v and levels where B^p(k) is not inside B^{p+1}(k) (resp. B^*(k)) for some k.

        B^p(k) is {v : burn_time^p(v) <= k}, so the inclusions hold for every k
        exactly when burn times are pointwise nonincreasing up the chain.
        """
        big = np.iinfo(np.int64).max
        chain = [lv.burn_time for lv in self.levels] + [self.star.burn_time]
        times = [np.where(bt == UNBURNED, big, bt.astype(np.int64)) for bt in chain]
        return int(sum(np.count_nonzero(upper > lower) for lower, upper in zip(times, times[1:])))

    def attempt_violations(self) -> int:
        """Steps i and levels where H_i^{p+1} <= H_i^{p+2} <= H_i^* fails."""
        rows = [lv.attempts for lv in self.levels[1:]] + [self.next_attempts, self.star.attempts]
        return int(sum(np.count_nonzero(a > b) for a, b in zip(rows, rows[1:])))


def run_coupled_hierarchy(
    spec: TorusSpec,
    seed: int,
    p_max: int,
    horizon: Optional[int] = None,
    memory_budget: int = COUPLED_MEMORY_BUDGET,
) -> CoupledRun:
    """Simulate B^0, ..., B^{p_max} and B^* in lockstep on one randomness table.

    Runs until B^* covers the torus unless ``horizon`` caps the number of steps.
    ``next_attempts`` holds H_i^{p_max + 1}, the attempts level p_max would hand to
    the next level up.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    _check_driver_spec(spec)
    per_level = spec.volume * (1 + 4)  # mask + int32 burn times
    if (p_max + 2) * per_level > memory_budget:
        raise ResourceGuardError(
            f"coupled run needs ~{(p_max + 2) * per_level} bytes for {p_max + 2} levels; "
            f"budget is {memory_budget}"
        )
    table = RandomnessTable(seed, spec.volume)
    states = [BurnState(spec, track_unburned=False) for _ in range(p_max + 1)]
    star = BurnState(spec, track_unburned=False)
    counts = [[spec.volume] for _ in range(p_max + 1)]
    star_counts = [spec.volume]
    attempts = [[] for _ in range(p_max + 2)]  # attempts[q] = H^q, q = 1..p_max+1
    ignitions = [[] for _ in range(p_max + 2)]
    star_attempts, star_ignitions = [], []

    k = 0
    while not star.full and (horizon is None or k < horizon):
        i = k + 1
        # Level q uses B^{q-1}(k); B^0 is empty forever, so H^1 = 1.
        h_star, y_star = table.first_outside(i, star.burned)
        ys = {}
        for q in range(1, p_max + 2):
            h, y = table.first_outside(i, states[q - 1].burned)
            attempts[q].append(h)
            ignitions[q].append(y)
            ys[q] = y
        star_attempts.append(h_star)
        star_ignitions.append(y_star)
        states[0].step(None)
        counts[0].append(states[0].unburned_count)
        for p in range(1, p_max + 1):
            states[p].step(ys[p])
            counts[p].append(states[p].unburned_count)
        star.step(y_star)
        star_counts.append(star.unburned_count)
        k = i

    levels = []
    for p in range(p_max + 1):
        levels.append(
            LevelTrace(
                label=str(p),
                unburned_per_step=np.asarray(counts[p], dtype=np.int64),
                burn_time=states[p].burn_time,
                attempts=np.asarray(attempts[p] if p else [], dtype=np.int64),
                ignitions=np.asarray(ignitions[p] if p else [], dtype=np.int64),
                tau=states[p].k if states[p].full else None,
            )
        )
    star_trace = LevelTrace(
        label="*",
        unburned_per_step=np.asarray(star_counts, dtype=np.int64),
        burn_time=star.burn_time,
        attempts=np.asarray(star_attempts, dtype=np.int64),
        ignitions=np.asarray(star_ignitions, dtype=np.int64),
        tau=star.k if star.full else None,
    )
    return CoupledRun(
        spec=spec,
        seed=int(seed),
        p_max=p_max,
        horizon=k,
        levels=levels,
        star=star_trace,
        next_attempts=np.asarray(attempts[p_max + 1], dtype=np.int64),
    )


def trace_from_level(spec: TorusSpec, level: LevelTrace, seed: int) -> BurnTrace:
    return BurnTrace(
        spec=spec,
        tau=level.tau,
        unburned_per_step=level.unburned_per_step,
        burn_time=level.burn_time,
        ignitions=level.ignitions,
        meta={"process": f"coupled-{level.label}", "seed": seed},
    )
