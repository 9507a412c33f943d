#!/usr/bin/env python3
"""Burn-time snapshots of one rejection-sampling run on the 600 x 600 torus."""
import argparse
from pathlib import Path

from torusburn.processes import run_rejection_sampling
from torusburn.render import colorize, write_ppm
from torusburn.torus import TorusSpec


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=600)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--steps", type=int, nargs="+", default=[50, 100])
    parser.add_argument("--out", type=Path, default=Path("out/snapshots"))
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    trace = run_rejection_sampling(TorusSpec(2, args.n), args.seed)
    print(f"tau = {trace.tau}")
    for k in sorted(set(args.steps + [trace.tau])):
        img = colorize(trace.burn_time, args.n, at_step=k, scale_max=trace.tau)
        path = args.out / f"step_{k:04d}.ppm"
        write_ppm(path, img)
        print(f"step {k}: unburned {int(trace.unburned_per_step[min(k, trace.steps)])} -> {path}")


if __name__ == "__main__":
    main()
