"""Command-line entry point: ``torusburn {simulate,experiment,blasius,partition,render}``.

Exit codes: 0 success, 1 I/O failure, 2 usage or invalid parameters,
3 resource guard, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_GUARD, EXIT_NUMERIC = 0, 1, 2, 3, 4


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    from .experiments import normalizer
    from .processes import (
        run_coupled_hierarchy, run_coupon_collector, run_rejection_sampling,
        run_rejection_sampling_literal, trace_from_level,
    )
    from .torus import TorusSpec
    from .traceio import write_trace

    spec = TorusSpec(args.d, args.n)
    out = _out_dir(args)
    stem = f"trace_d{spec.d}_n{spec.n}_{args.process}_s{args.seed}"
    extra = {}
    if args.process == "coupled":
        run = run_coupled_hierarchy(spec, args.seed, args.p_max, horizon=args.max_steps)
        trace = trace_from_level(spec, run.star, args.seed)
        extra = {
            "levels": {lv.label: lv.unburned_per_step.tolist() for lv in run.levels},
            "inclusion_violations": run.inclusion_violations(),
            "attempt_violations": run.attempt_violations(),
        }
    else:
        fn = {"cc": run_coupon_collector, "rs": run_rejection_sampling,
              "literal-rs": run_rejection_sampling_literal}[args.process]
        trace = fn(spec, args.seed, max_steps=args.max_steps)
    trace.meta.update(extra)
    path = write_trace(trace, out / f"{stem}.json", burn_time=not args.no_burn_time)
    norm = normalizer(spec, args.process)
    if trace.tau is None:
        print(f"tau not reached after {trace.steps} steps; unburned {int(trace.unburned_per_step[-1])}")
    else:
        print(f"tau = {trace.tau}")
        print(f"normalized tau = {trace.tau / norm:.6f}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    from . import experiments as ex

    out = _out_dir(args)
    jobs = args.jobs or os.cpu_count() or 1
    n_values = sorted(set(args.n))
    if args.kind == "bounds":
        rows = ex.bounds_scaling_experiment(args.d, n_values)
        path = out / f"bounds_d{args.d}.json"
        path.write_text(json.dumps([asdict(r) for r in rows], indent=2, sort_keys=True) + "\n")
        for r in rows:
            print(f"n={r.n} kappa/n^(d/(d+1))={r.kappa_ratio:.4f} (alpha={r.alpha:.4f}) "
                  f"greedy={r.greedy_ratio} (gamma={r.gamma:.4f})")
        print(f"wrote {path}")
        return EXIT_OK
    process = args.process
    if args.kind == "picard":
        process = "coupled"
    plan = ex.ExperimentPlan(d=args.d, n_values=n_values, trials=args.trials, seed_base=args.seed,
                             process=process, p_max=args.p_max, jobs=jobs)
    stem = f"{args.kind}_d{args.d}_{process}_s{args.seed}"
    if args.kind == "tau":
        report = ex.tau_scaling_experiment(plan)
        report.write_json(out / f"{stem}.json")
        report.write_csv(out / f"{stem}.csv")
        for r in report.rows:
            print(f"n={r.n} mean={r.mean:.4f} std={r.std:.4f} q05={r.q05:.4f} q95={r.q95:.4f}")
    elif args.kind == "profile":
        report = ex.functional_profile_experiment(plan)
        report.write_json(out / f"{stem}.json")
        for r in report.rows:
            print(f"n={r.n} mean sup-deviation={r.mean_sup_deviation:.4f}")
    else:
        report = ex.picard_profile_experiment(plan)
        (out / f"{stem}.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        for r in report.rows:
            devs = " ".join(f"{x:.4f}" for x in r.mean_sup_deviation)
            print(f"n={r.n} mean sup-deviation per level: {devs}")
    print(f"wrote {out / stem}.*")
    return EXIT_OK


def cmd_blasius(args) -> int:
    from .blasius import solve_blasius

    sol = solve_blasius(args.d, blowup_threshold=args.blowup_threshold, tolerance=args.tolerance)
    out = _out_dir(args)
    t_path = out / f"blasius_d{args.d}_T.txt"
    t_path.write_text(
        f"# d T error_bound tolerance blowup_threshold\n"
        f"{args.d} {sol.T_estimate!r} {sol.T_error_bound:.3e} {args.tolerance:g} {args.blowup_threshold:g}\n"
    )
    steps = int(np.floor(sol.t_last * 100))
    t = np.arange(steps + 1) / 100.0
    yd = sol.yd(t)
    traj = out / f"blasius_d{args.d}_trajectory.csv"
    with open(traj, "w") as fh:
        fh.write("t,y_d\n")
        for ti, vi in zip(t, yd):
            fh.write(f"{ti:.2f},{float(vi)!r}\n")
    print(f"T({args.d}) = {sol.T_estimate!r} +- {sol.T_error_bound:.2e}")
    print(f"wrote {t_path} and {traj}")
    return EXIT_OK


def cmd_partition(args) -> int:
    from .partitions import build_nested_partition, verify_partition
    from .torus import TorusSpec

    part = build_nested_partition(TorusSpec(args.d, args.n), args.epsilon)
    report = verify_partition(part, args.mode)
    doc = {"d": args.d, "n": args.n, "epsilon": args.epsilon, "h": part.h, "ell": part.ell,
           "m": part.height, "radii": part.radii, "C": part.C, **asdict(report), "violations": report.violations, "ok": report.ok}
    out = _out_dir(args)
    path = out / f"partition_d{args.d}_n{args.n}_eps{args.epsilon:g}.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=float) + "\n")
    print(f"h={part.h} l={part.ell} m={part.height} mode={report.mode} violations={report.violations}")
    print(f"wrote {path}")
    return EXIT_OK if report.ok else EXIT_NUMERIC


def cmd_render(args) -> int:
    from .render import colorize, write_ppm
    from .traceio import read_trace

    trace = read_trace(args.trace)
    if trace.spec.d != 2:
        raise ValueError(f"render needs a d=2 trace, got d={trace.spec.d}")
    if trace.burn_time is None:
        raise ValueError(f"{args.trace} has no burn_time field")
    img = colorize(trace.burn_time, trace.spec.n, at_step=args.at_step)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_ppm(out, img)
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    from .blasius import DEFAULT_THRESHOLD, DEFAULT_TOLERANCE

    parser = argparse.ArgumentParser(prog="torusburn", description="Random burning on the discrete torus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one burning process and write its trace")
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--process", choices=["cc", "rs", "literal-rs", "coupled"], default="rs")
    p.add_argument("--p-max", type=_positive, default=4)
    p.add_argument("--max-steps", type=_positive, default=None)
    p.add_argument("--no-burn-time", action="store_true", help="skip the binary burn-time file")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="Monte-Carlo scaling experiments")
    p.add_argument("kind", choices=["tau", "profile", "picard", "bounds"])
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--n", type=_positive, nargs="+", required=True)
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--seed", type=int, default=0, help="seed base; trial i uses seed + i")
    p.add_argument("--process", choices=["cc", "rs", "literal-rs", "coupled"], default="rs")
    p.add_argument("--p-max", type=_positive, default=4)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("blasius", help="solve the blow-up ODE and write T(d) and y^(d)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--blowup-threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_blasius)

    p = sub.add_parser("partition", help="build and verify the nested box partition")
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--mode", choices=["auto", "explicit", "factorized"], default="auto")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("render", help="write a burn-time heatmap (binary PPM) of a d=2 trace")
    p.add_argument("trace", help="trace JSON written by simulate")
    p.add_argument("--out", required=True)
    p.add_argument("--at-step", type=int, default=None, help="show the burned set after this step")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    from .blasius import BlasiusSolverError
    from .partitions import PartitionRegimeError
    from .torus import ResourceGuardError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (BlasiusSolverError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PartitionRegimeError as exc:
        print(f"parameter regime: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
