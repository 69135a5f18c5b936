"""Command-line front end: ``vidoffload {solve,sweep,validate}``.

Exit codes:
  0  success
  2  bad command-line usage
  3  config file missing or unreadable
  4  config schema or model validation error
  5  accuracy requirement cannot be met
  6  enumeration refused (too many devices)
  7  output directory not writable
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from .config import CONFIG_ENV, ConfigError, load_config
from .core import Allocation, AllocationEntry, InfeasibleAccuracyError, validate
from .dnn import min_frames
from .experiment import AXES, fmt, generate_scenario, solve_scenario, sweep, write_sweep_csv
from .offload import METHODS, EnumerationCapError
from .solvers import solve_local
from .wireless import achievable_rate_bps, path_loss_dB

EXIT_OK, EXIT_USAGE, EXIT_NO_FILE, EXIT_SCHEMA, EXIT_ACCURACY, EXIT_CAP, EXIT_OUTPUT = 0, 2, 3, 4, 5, 6, 7

METHOD_ALIASES = {"enum": "enumeration", "local": "local-all", "edge": "edge-all"}

ALLOCATION_COLUMNS = (
    "device_id",
    "distance_km",
    "rate_bps",
    "offload",
    "frames",
    "f_local_Hz",
    "f_edge_Hz",
    "time_share",
    "delay_s",
    "energy_J",
    "weighted",
)


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(path):
    try:
        return load_config(path)
    except FileNotFoundError as exc:
        raise CLIError(f"config file not found: {exc.filename}", EXIT_NO_FILE) from None
    except (IsADirectoryError, PermissionError) as exc:
        raise CLIError(f"cannot read config: {exc}", EXIT_NO_FILE) from None
    except ConfigError as exc:
        raise CLIError(f"config error: {exc}", EXIT_SCHEMA) from None
    except ValueError as exc:  # model constructors (monotonicity, ranges)
        raise CLIError(f"config error: {exc}", EXIT_SCHEMA) from None


def _models(cfg):
    try:
        return cfg.models()
    except ValueError as exc:
        raise CLIError(f"model error: {exc}", EXIT_SCHEMA) from None


def parse_values(text: str) -> list[float]:
    """``"2:24:2"`` (inclusive range) or ``"0.1,0.5,0.9"``."""
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError(f"range must be start:stop:step with step > 0, got {text!r}")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + k * step for k in range(count)]
    else:
        values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise argparse.ArgumentTypeError("no values given")
    return [int(v) if float(v).is_integer() and abs(v) < 2**53 else round(v, 12) for v in values]


def write_allocation_csv(path, sc, report) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ALLOCATION_COLUMNS)
        for dev, rate, e, c in zip(sc.devices, sc.rates, report.allocation, report.costs):
            w.writerow(
                [dev.id, fmt(dev.distance_km), fmt(rate), int(e.offload), e.frames]
                + [fmt(float(v)) for v in (e.f_local_Hz, e.f_edge_Hz, e.time_share, c.delay_s, c.energy_J, c.weighted)]
            )


def read_allocation_csv(path) -> Allocation:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return Allocation(
        tuple(
            AllocationEntry(
                device_id=int(r["device_id"]),
                offload=bool(int(r["offload"])),
                frames=int(r["frames"]),
                f_local_Hz=float(r["f_local_Hz"]),
                f_edge_Hz=float(r["f_edge_Hz"]),
                time_share=float(r["time_share"]),
            )
            for r in rows
        )
    )


def cmd_solve(args) -> int:
    cfg = _load(args.config)
    method = METHOD_ALIASES.get(args.method, args.method)
    n = args.devices if args.devices is not None else cfg.devices.count
    seed = args.seed if args.seed is not None else cfg.experiment.seed
    if n < 1:
        raise CLIError("--devices must be at least 1", EXIT_USAGE)
    if method == "enumeration" and n > cfg.experiment.enum_cap:
        raise CLIError(f"enumeration over {n} devices exceeds the cap of {cfg.experiment.enum_cap}", EXIT_CAP)
    _models(cfg)
    try:
        sc = generate_scenario(seed, n, cfg, trial=args.trial)
        rep = solve_scenario(sc, method)
    except InfeasibleAccuracyError as exc:
        raise CLIError(f"infeasible accuracy: {exc} (devices {exc.device_ids})", EXIT_ACCURACY) from None
    except EnumerationCapError as exc:
        raise CLIError(str(exc), EXIT_CAP) from None

    offloaded = [e for e in rep.allocation if e.offload]
    print(f"method            {rep.method}")
    print(f"devices           {n}")
    print(f"seed/trial        {seed}/{args.trial}")
    print(f"total cost        {rep.total_cost:.6f}")
    print(f"avg cost/device   {rep.total_cost / n:.6f}")
    print(f"offloading rate   {rep.offloading_rate:.4f}")
    if rep.method.startswith("greedy"):
        print(f"iterations        {rep.iterations}")
        print(f"moved local       {rep.moves}")
    if offloaded:
        print(f"sum time share    {math.fsum(e.time_share for e in offloaded):.12f}")
        print(f"sum edge GHz      {math.fsum(e.f_edge_Hz for e in offloaded) / 1e9:.9f}")
    print()
    print(
        f"{'id':>4} {'dist_m':>8} {'rate_Mbps':>10} {'where':>6} {'M':>3} {'f_loc_GHz':>10} "
        f"{'f_edge_GHz':>11} {'t_share':>8} {'delay_s':>9} {'energy_J':>10} {'cost':>9}"
    )
    for dev, rate, e, c in zip(sc.devices, sc.rates, rep.allocation, rep.costs):
        print(
            f"{dev.id:>4} {dev.distance_km * 1e3:>8.1f} {rate / 1e6:>10.3f} {'edge' if e.offload else 'local':>6} "
            f"{e.frames:>3} {e.f_local_Hz / 1e9:>10.4f} {e.f_edge_Hz / 1e9:>11.4f} {e.time_share:>8.4f} "
            f"{c.delay_s:>9.5f} {c.energy_J:>10.6f} {c.weighted:>9.5f}"
        )
    if args.csv:
        try:
            Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
            write_allocation_csv(args.csv, sc, rep)
        except OSError as exc:
            raise CLIError(f"cannot write {args.csv}: {exc}", EXIT_OUTPUT) from None
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args.config)
    _models(cfg)
    methods = [METHOD_ALIASES.get(m, m) for m in args.methods.split(",")] if args.methods else None
    if methods:
        bad = [m for m in methods if m not in METHODS]
        if bad:
            raise CLIError(f"unknown methods {bad}", EXIT_USAGE)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise CLIError(f"output directory not writable: {exc}", EXIT_OUTPUT) from None
    try:
        table = sweep(cfg, args.axis, args.values, methods, n_trials=args.trials, workers=args.workers)
    except InfeasibleAccuracyError as exc:
        raise CLIError(f"infeasible accuracy: {exc}", EXIT_ACCURACY) from None
    except EnumerationCapError as exc:
        raise CLIError(str(exc), EXIT_CAP) from None
    try:
        agg, per = write_sweep_csv(out, args.axis, table)
    except OSError as exc:
        raise CLIError(f"cannot write results: {exc}", EXIT_OUTPUT) from None
    print(f"wrote {agg}")
    print(f"wrote {per}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args.config)
    models = _models(cfg)
    dd = cfg.devices
    print("schema            OK")
    print("C(M) nondecreasing OK")
    print("accuracy monotone OK")
    c1 = models.complexity.macs(1)
    print(f"MACs per frame    {c1:.6g}")
    try:
        m_star = min_frames(models.accuracy, dd.accuracy_req, min(dd.m_max, models.complexity.m_max))
    except InfeasibleAccuracyError as exc:
        ids = list(range(1, dd.count + 1))
        print(f"infeasible accuracy: {exc}; affects devices {ids}", file=sys.stderr)
        return EXIT_ACCURACY
    print(f"alpha             {dd.accuracy_req}")
    print(f"min frames M*     {m_star} (accuracy {models.accuracy.accuracy(m_star):.4f})")
    print(f"C(M*)             {models.complexity.macs(m_star):.6g} MACs")
    sample = generate_scenario(cfg.experiment.seed, 1, cfg).devices[0]
    loc = solve_local(sample, cfg.system, models.complexity.macs(m_star))
    print(f"local f*          {loc.f_local_Hz / 1e9:.6f} GHz  (cost {loc.cost:.6f})")
    ch = cfg.system.channel()
    half_diag = cfg.system.area_m / 2 * math.sqrt(2)
    for d_m in (10.0, 50.0, 100.0, 250.0, half_diag):
        dev = sample.__class__(**{**sample.__dict__, "distance_km": d_m / 1000})
        print(
            f"rate @ {d_m:7.1f} m  {achievable_rate_bps(dev, ch) / 1e6:9.3f} Mbps  "
            f"(path loss {path_loss_dB(dev.distance_km, ch):.2f} dB)"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vidoffload", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add_config(sp):
        sp.add_argument("config", nargs="?", help=f"YAML config (default: ${CONFIG_ENV} or built-in defaults)")

    s = sub.add_parser("solve", help="solve one random scenario and print the allocation")
    add_config(s)
    s.add_argument("--method", default="greedy", choices=sorted(set(METHODS) | set(METHOD_ALIASES)))
    s.add_argument("--seed", type=int)
    s.add_argument("--trial", type=int, default=0)
    s.add_argument("--devices", type=int)
    s.add_argument("--csv", help="also write the per-device allocation to this CSV file")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="run Monte-Carlo trials over one parameter axis")
    add_config(w)
    w.add_argument("--axis", required=True, choices=AXES)
    w.add_argument("--values", required=True, type=parse_values, help="start:stop:step or comma list")
    w.add_argument("--out", required=True)
    w.add_argument("--methods", help="comma list, e.g. greedy,local,edge,random")
    w.add_argument("--trials", type=int)
    w.add_argument("--workers", type=int)
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="check a config and print derived quantities")
    add_config(v)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
