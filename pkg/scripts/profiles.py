#!/usr/bin/env python3
"""Unburned-fraction profiles: rs against 1/y^(d), coupled levels against 1/f_p."""
import argparse

from torusburn.experiments import (
    ExperimentPlan,
    functional_profile_experiment,
    picard_profile_experiment,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, default=1)
    parser.add_argument("--n", type=int, nargs="+", default=[1000, 10000, 100000])
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--p-max", type=int, default=4)
    args = parser.parse_args()

    rs = functional_profile_experiment(ExperimentPlan(args.d, args.n, args.trials, process="rs"))
    print(f"rs vs 1/y^(d) on [0, {rs.t_max:.4f}]")
    for r in rs.rows:
        print(f"  n={r.n:>7}  mean sup-dev {r.mean_sup_deviation:.4f}  max {r.max_sup_deviation:.4f}")
    pic = picard_profile_experiment(
        ExperimentPlan(args.d, args.n, args.trials, process="coupled", p_max=args.p_max)
    )
    print(f"B^p vs 1/f_p on [0, {pic.t_end:.4f}]")
    for r in pic.rows:
        print(f"  n={r.n:>7}  " + " ".join(f"p{p}={x:.4f}" for p, x in enumerate(r.mean_sup_deviation)))


if __name__ == "__main__":
    main()
