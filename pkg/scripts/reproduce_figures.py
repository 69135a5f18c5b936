#!/usr/bin/env python3
"""Regenerate the sweep tables behind the device-count, bandwidth/edge-CPU and
delay-energy plots as CSV files.

    python3 scripts/reproduce_figures.py --out results/ [--trials 100] [--workers 4]
"""

import argparse
import time

from vidoffload.config import load_config
from vidoffload.experiment import sweep, write_sweep_csv

SWEEPS = {
    "device-count": (list(range(2, 25, 2)), ["greedy", "local-all", "edge-all", "random"]),
    "bandwidth": ([1e6 * k for k in range(1, 11)], ["greedy"]),
    "edge-compute": ([4e9 * k for k in range(1, 11)], ["greedy"]),
    "beta": ([round(0.1 * k, 1) for k in range(1, 10)], ["greedy"]),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config", nargs="?", help="YAML config (defaults if omitted)")
    ap.add_argument("--out", default="results")
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--only", choices=sorted(SWEEPS), action="append")
    args = ap.parse_args(argv)

    cfg = load_config(args.config)
    for axis in args.only or SWEEPS:
        values, methods = SWEEPS[axis]
        t0 = time.perf_counter()
        table = sweep(cfg, axis, values, methods, n_trials=args.trials, workers=args.workers)
        agg, _ = write_sweep_csv(args.out, axis, table)
        print(f"{axis:13s} {len(values):3d} points  {time.perf_counter() - t0:6.1f} s  -> {agg}")
        for value, res in table:
            row = "  ".join(f"{m}={r.offloading_rate:.3f}/{r.avg_cost:.4f}" for m, r in res.items())
            print(f"    {value:<10g} {row}")


if __name__ == "__main__":
    main()
