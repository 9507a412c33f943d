"""Monte-Carlo experiments comparing simulations with the limiting constants and profiles.

Trial i of a plan uses seed ``seed_base + i``; with ``jobs > 1`` trials run in a
process pool but results are always reduced in trial order, so reports do not
depend on scheduling. All acceptance bands built on these reports are
engineering choices from pilot runs, since the scaling limits come without rates.
"""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .blasius import default_solution, limit_profile, picard_iterates
from .burn import (
    BurnTrace,
    best_greedy_bound,
    kappa_lower_bound,
    bound_constants,
    radius_grid,
)
from .constants import reference_T
from .processes import (
    run_coupled_hierarchy,
    run_coupon_collector,
    run_rejection_sampling,
    run_rejection_sampling_literal,
    trace_from_level,
)
from .torus import ResourceGuardError, TorusSpec

PROCESSES = ("cc", "rs", "literal-rs", "coupled")
DEFAULT_MAX_VERTICES = 50_000_000
PROFILE_GRID_POINTS = 256
PROFILE_FRACTION = 0.95
TOLERANCE_NOTE = "bands and tolerances are engineering choices; the scaling limits come without rates"


@dataclass
class ExperimentPlan:
    d: int
    n_values: Sequence[int]
    trials: int = 100
    seed_base: int = 0
    process: str = "rs"
    p_max: Optional[int] = None
    grid_points: int = PROFILE_GRID_POINTS
    jobs: int = 1
    max_vertices: int = DEFAULT_MAX_VERTICES

    def __post_init__(self):
        self.n_values = [int(n) for n in self.n_values]
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_values or any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("n_values must be nonempty and strictly increasing")
        if self.process not in PROCESSES:
            raise ValueError(f"process must be one of {PROCESSES}")
        if self.process == "coupled" and (self.p_max is None or self.p_max < 1):
            raise ValueError("coupled process needs p_max >= 1")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")

    def specs(self) -> list[TorusSpec]:
        out = []
        for n in self.n_values:
            if n ** self.d > self.max_vertices:
                raise ResourceGuardError(f"n^d = {n ** self.d} exceeds max_vertices = {self.max_vertices}")
            out.append(TorusSpec(self.d, n))
        return out


def scale(spec: TorusSpec) -> float:
    return spec.n ** (spec.d / (spec.d + 1))


def cc_normalizer(spec: TorusSpec) -> float:
    """(d!/2^d * n^d * ln n^d)^{1/(d+1)}."""
    d = spec.d
    return (math.factorial(d) / 2 ** d * spec.volume * math.log(spec.volume)) ** (1 / (d + 1))


def rs_normalizer(spec: TorusSpec) -> float:
    return reference_T(spec.d) * scale(spec)


def normalizer(spec: TorusSpec, process: str) -> float:
    return cc_normalizer(spec) if process == "cc" else rs_normalizer(spec)


def run_process(spec: TorusSpec, process: str, seed: int, p_max: Optional[int] = None) -> BurnTrace:
    if process == "cc":
        return run_coupon_collector(spec, seed)
    if process == "rs":
        return run_rejection_sampling(spec, seed)
    if process == "literal-rs":
        return run_rejection_sampling_literal(spec, seed)
    if process == "coupled":
        run = run_coupled_hierarchy(spec, seed, p_max or 1)
        return trace_from_level(spec, run.star, seed)
    raise ValueError(f"unknown process {process!r}")


def map_trials(fn: Callable, tasks: list, jobs: int = 1) -> list:
    """Apply ``fn`` to every task, in a process pool when jobs > 1; output is in task order."""
    if jobs is None or jobs < 1:
        jobs = os.cpu_count() or 1
    if jobs == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _tau_task(task) -> int:
    d, n, process, seed, p_max = task
    trace = run_process(TorusSpec(d, n), process, seed, p_max)
    return trace.tau


@dataclass
class ScalingRow:
    n: int
    trials: int
    normalizer: float
    mean: float
    std: float
    q05: float
    q50: float
    q95: float
    tau_q05: float
    tau_q95: float
    kappa_ratio: float
    profile_deviation: Optional[float] = None


@dataclass
class ScalingReport:
    d: int
    process: str
    statistic: str
    seed_base: int
    rows: list[ScalingRow]
    samples: dict[int, list[int]] = field(default_factory=dict)
    note: str = TOLERANCE_NOTE

    def to_dict(self) -> dict:
        out = asdict(self)
        out["samples"] = {str(k): v for k, v in self.samples.items()}
        return out

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_csv(self, path) -> None:
        """One line per (n, statistic)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "statistic", "value"])
            for row in self.rows:
                for key, val in asdict(row).items():
                    if key != "n" and val is not None:
                        w.writerow([row.n, key, repr(float(val))])


def tau_scaling_experiment(plan: ExperimentPlan) -> ScalingReport:
    """Normalised burning times: tau^cc by the log normaliser, anything else by T(d) n^{d/(d+1)}."""
    rows, samples = [], {}
    for spec in plan.specs():
        tasks = [(spec.d, spec.n, plan.process, plan.seed_base + i, plan.p_max) for i in range(plan.trials)]
        taus = np.array(map_trials(_tau_task, tasks, plan.jobs), dtype=float)
        norm = normalizer(spec, plan.process)
        x = taus / norm
        rows.append(
            ScalingRow(
                n=spec.n, trials=plan.trials, normalizer=norm,
                mean=float(x.mean()), std=float(x.std(ddof=1)) if len(x) > 1 else 0.0,
                q05=float(np.quantile(x, 0.05)), q50=float(np.quantile(x, 0.5)), q95=float(np.quantile(x, 0.95)),
                tau_q05=float(np.quantile(taus, 0.05)), tau_q95=float(np.quantile(taus, 0.95)),
                kappa_ratio=kappa_lower_bound(spec) / norm,
            )
        )
        samples[spec.n] = taus.astype(int).tolist()
    stat = "tau/(d!/2^d n^d ln n^d)^(1/(d+1))" if plan.process == "cc" else "tau/(T n^(d/(d+1)))"
    return ScalingReport(d=plan.d, process=plan.process, statistic=stat, seed_base=plan.seed_base,
                         rows=rows, samples=samples)


def profile_grid(d: int, points: int = PROFILE_GRID_POINTS, fraction: float = PROFILE_FRACTION) -> np.ndarray:
    return np.linspace(0.0, fraction * reference_T(d), points)


def empirical_profile(unburned_per_step: np.ndarray, spec: TorusSpec, t: np.ndarray) -> np.ndarray:
    """Unburned fraction at step floor(t n^{d/(d+1)}); past the last step the last value holds."""
    k = np.floor(np.asarray(t) * scale(spec) + 1e-9).astype(np.int64)
    k = np.minimum(k, len(unburned_per_step) - 1)
    return np.asarray(unburned_per_step)[k] / spec.volume


def _profile_task(task) -> float:
    d, n, seed, grid = task
    spec = TorusSpec(d, n)
    trace = run_rejection_sampling(spec, seed)
    return float(np.max(np.abs(empirical_profile(trace.unburned_per_step, spec, grid) - limit_profile(d, grid))))


@dataclass
class ProfileRow:
    n: int
    trials: int
    mean_sup_deviation: float
    std_sup_deviation: float
    max_sup_deviation: float


@dataclass
class ProfileReport:
    d: int
    t_max: float
    grid_points: int
    rows: list[ProfileRow]
    note: str = TOLERANCE_NOTE

    def to_dict(self) -> dict:
        return asdict(self)

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def functional_profile_experiment(plan: ExperimentPlan) -> ProfileReport:
    """Sup over a grid on [0, 0.95 T] of |empirical rs unburned fraction - 1/y^(d)(t)|."""
    if plan.process not in ("rs", "literal-rs"):
        raise ValueError("functional profile is defined for the rs process")
    grid = profile_grid(plan.d, plan.grid_points)
    default_solution(plan.d)  # solve once before forking workers
    rows = []
    for spec in plan.specs():
        tasks = [(spec.d, spec.n, plan.seed_base + i, grid) for i in range(plan.trials)]
        dev = np.array(map_trials(_profile_task, tasks, plan.jobs))
        rows.append(ProfileRow(n=spec.n, trials=plan.trials, mean_sup_deviation=float(dev.mean()),
                               std_sup_deviation=float(dev.std()), max_sup_deviation=float(dev.max())))
    return ProfileReport(d=plan.d, t_max=float(grid[-1]), grid_points=len(grid), rows=rows)


def _picard_task(task) -> list[float]:
    d, n, seed, p_max, grid, inverse = task
    spec = TorusSpec(d, n)
    horizon = int(math.floor(grid[-1] * scale(spec) + 1e-9)) + 1
    run = run_coupled_hierarchy(spec, seed, p_max, horizon=horizon)
    out = []
    for p in range(p_max + 1):
        emp = empirical_profile(run.level(p).unburned_per_step, spec, grid)
        out.append(float(np.max(np.abs(emp - inverse[p]))))
    return out


@dataclass
class PicardRow:
    n: int
    trials: int
    mean_sup_deviation: list[float]
    max_sup_deviation: list[float]


@dataclass
class PicardReport:
    d: int
    p_max: int
    t_end: float
    quadrature_error: list[float]
    rows: list[PicardRow]
    note: str = TOLERANCE_NOTE

    def to_dict(self) -> dict:
        return asdict(self)


def picard_profile_experiment(plan: ExperimentPlan, t_end: Optional[float] = None) -> PicardReport:
    """Per level p <= p_max, sup over [0, t_end] of |unburned fraction of B^p - 1/f_p(t)|."""
    if plan.p_max is None or plan.p_max < 1:
        raise ValueError("plan needs p_max >= 1")
    T = reference_T(plan.d)
    t_end = 0.9 * T if t_end is None else t_end
    grid = np.linspace(0.0, t_end, plan.grid_points)
    iterates = picard_iterates(plan.d, plan.p_max, t_end)
    inverse = np.array([1.0 / iterates(p, grid) for p in range(plan.p_max + 1)])
    rows = []
    for spec in plan.specs():
        tasks = [(spec.d, spec.n, plan.seed_base + i, plan.p_max, grid, inverse) for i in range(plan.trials)]
        dev = np.array(map_trials(_picard_task, tasks, plan.jobs))
        rows.append(PicardRow(n=spec.n, trials=plan.trials, mean_sup_deviation=dev.mean(axis=0).tolist(),
                              max_sup_deviation=dev.max(axis=0).tolist()))
    return PicardReport(d=plan.d, p_max=plan.p_max, t_end=float(t_end),
                        quadrature_error=iterates.quadrature_error.tolist(), rows=rows)


@dataclass
class BoundsRow:
    n: int
    kappa: int
    kappa_ratio: float
    greedy_bound: Optional[int]
    greedy_radius: Optional[int]
    greedy_ratio: Optional[float]
    alpha: float
    gamma: float


def bounds_scaling_experiment(d: int, n_values: Sequence[int], greedy_max_vertices: int = 10_000_000) -> list[BoundsRow]:
    """kappa_n and the best greedy cover bound, both divided by n^{d/(d+1)}.

    The greedy bound is skipped (None) when n^d exceeds ``greedy_max_vertices``.
    """
    alpha, gamma = bound_constants(d)
    rows = []
    for n in n_values:
        spec = TorusSpec(d, n)
        s = scale(spec)
        kappa = kappa_lower_bound(spec)
        bound = radius = ratio = None
        radii = radius_grid(spec)
        if spec.volume <= greedy_max_vertices and radii:
            best = best_greedy_bound(spec, radii)
            bound, radius, ratio = best.bound, best.radius, best.bound / s
        rows.append(BoundsRow(n=n, kappa=kappa, kappa_ratio=kappa / s, greedy_bound=bound,
                              greedy_radius=radius, greedy_ratio=ratio, alpha=alpha, gamma=gamma))
    return rows
