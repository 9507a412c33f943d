#!/usr/bin/env python3
"""Normalised burning times across n for the cc or rs process; writes CSV and JSON reports."""
import argparse
from pathlib import Path

from torusburn.experiments import ExperimentPlan, tau_scaling_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, default=1)
    parser.add_argument("--n", type=int, nargs="+", default=[1000, 10000, 100000])
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--process", default="rs", choices=["cc", "rs", "literal-rs"])
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", type=Path, default=Path("out"))
    args = parser.parse_args()

    plan = ExperimentPlan(d=args.d, n_values=args.n, trials=args.trials, seed_base=args.seed,
                          process=args.process, jobs=args.jobs)
    report = tau_scaling_experiment(plan)
    args.out.mkdir(parents=True, exist_ok=True)
    stem = args.out / f"tau_d{args.d}_{args.process}"
    report.write_csv(f"{stem}.csv")
    report.write_json(f"{stem}.json")
    print(f"{'n':>8} {'mean':>8} {'std':>8} {'q05':>8} {'q95':>8}   {report.statistic}")
    for r in report.rows:
        print(f"{r.n:>8} {r.mean:8.4f} {r.std:8.4f} {r.q05:8.4f} {r.q95:8.4f}")


if __name__ == "__main__":
    main()
