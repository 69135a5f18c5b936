#!/usr/bin/env python3
"""Empirical optimality gap of the greedy offloading rule against exhaustive
enumeration on random default scenarios."""

import argparse

import numpy as np

from vidoffload.config import load_config
from vidoffload.experiment import generate_scenario
from vidoffload.offload import enumerate_offload, greedy_offload


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config", nargs="?")
    ap.add_argument("--scenarios", type=int, default=200)
    ap.add_argument("--max-devices", type=int, default=12)
    ap.add_argument("--extended", action="store_true", help="keep probing after the first rejected move")
    args = ap.parse_args(argv)

    cfg = load_config(args.config)
    rng = np.random.default_rng(cfg.experiment.seed)
    gaps = []
    for k in range(args.scenarios):
        sc = generate_scenario(cfg.experiment.seed, int(rng.integers(2, args.max_devices + 1)), cfg, trial=k)
        a = (sc.devices, cfg.system, sc.models, sc.rates)
        gaps.append(greedy_offload(*a, extended=args.extended).total_cost / enumerate_offload(*a).total_cost - 1)
    gaps = np.array(gaps)
    print(f"scenarios        {len(gaps)}")
    print(f"greedy optimal   {np.sum(gaps <= 1e-12)}")
    print(f"gap mean / p95   {gaps.mean():.3e} / {np.quantile(gaps, 0.95):.3e}")
    print(f"gap max          {gaps.max():.3e}")


if __name__ == "__main__":
    main()
