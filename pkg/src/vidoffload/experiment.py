"""Scenario generation, Monte-Carlo trials and parameter sweeps.

Devices are dropped uniformly in a square with the base station at its
centre. Trial ``t`` of a run with base seed ``s`` always sees the same
scenario, whichever method, sweep value or worker count is used.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .config import ExperimentConfig
from .core import DeviceProfile, InfeasibleAccuracyError, validate
from .dnn import min_frames
from .offload import Models, SolveReport, solve
from .rng import POSITION, stream
from .wireless import achievable_rate_bps

AXES = ("device-count", "bandwidth", "edge-compute", "beta", "accuracy")


@dataclass(frozen=True)
class Scenario:
    seed: int
    trial: int
    positions_m: tuple[tuple[float, float], ...]
    devices: tuple[DeviceProfile, ...]
    rates: tuple[float, ...]
    config: ExperimentConfig
    models: Models


def generate_scenario(seed: int, n_devices: int, cfg: ExperimentConfig, trial: int = 0) -> Scenario:
    if n_devices < 1:
        raise ValueError(f"need at least one device, got {n_devices}")
    models = cfg.models()
    dd, area = cfg.devices, cfg.system.area_m
    positions, devices = [], []
    for i in range(n_devices):
        x, y = stream(seed, trial, i, POSITION).uniform(0.0, area, size=2)
        dist_m = max(math.hypot(x - area / 2, y - area / 2), dd.min_distance_m)
        positions.append((float(x), float(y)))
        devices.append(
            DeviceProfile(
                id=i + 1,
                distance_km=dist_m / 1000.0,
                tx_power_W=dd.tx_power_W,
                frame_bits=dd.frame.bits,
                f_local_max_Hz=dd.f_local_max_Hz,
                accuracy_req=dd.accuracy_req,
                m_max=dd.m_max,
            )
        )
    # one shared model and requirement: redrawing positions cannot fix this
    try:
        min_frames(models.accuracy, dd.accuracy_req, min(dd.m_max, models.complexity.m_max))
    except InfeasibleAccuracyError as exc:
        raise InfeasibleAccuracyError(str(exc), [d.id for d in devices]) from None
    ch = cfg.system.channel()
    rates = tuple(achievable_rate_bps(d, ch) for d in devices)
    return Scenario(seed, trial, tuple(positions), tuple(devices), rates, cfg, models)


def solve_scenario(sc: Scenario, method: str) -> SolveReport:
    run = sc.config.experiment
    return solve(
        method,
        sc.devices,
        sc.config.system,
        sc.models,
        sc.rates,
        p=run.random_p,
        seed=sc.seed,
        trial=sc.trial,
        enum_cap=run.enum_cap,
    )


@dataclass(frozen=True)
class TrialRow:
    trial: int
    n_devices: int
    total_cost: float
    avg_cost: float
    avg_delay_s: float
    avg_energy_J: float
    offloading_rate: float
    wall_time_s: float = field(compare=False)


@dataclass
class ExperimentResult:
    method: str
    rows: list[TrialRow]

    def _mean(self, name: str) -> float:
        return math.fsum(getattr(r, name) for r in self.rows) / len(self.rows)

    @property
    def trials(self) -> int:
        return len(self.rows)

    @property
    def avg_cost(self) -> float:
        return self._mean("avg_cost")

    @property
    def avg_delay_s(self) -> float:
        return self._mean("avg_delay_s")

    @property
    def avg_energy_J(self) -> float:
        return self._mean("avg_energy_J")

    @property
    def offloading_rate(self) -> float:
        return self._mean("offloading_rate")

    @property
    def wall_time_s(self) -> float:
        return self._mean("wall_time_s")


def _run_one(args) -> list[tuple[str, TrialRow]]:
    cfg, n_devices, trial, methods = args
    sc = generate_scenario(cfg.experiment.seed, n_devices, cfg, trial)
    out = []
    for method in methods:
        t0 = time.perf_counter()
        rep = solve_scenario(sc, method)
        elapsed = time.perf_counter() - t0
        problems = validate(sc.devices, cfg.system, rep.allocation, sc.models.accuracy)
        if problems:
            raise AssertionError(f"{method} produced an infeasible allocation: {problems[0]}")
        n = len(sc.devices)
        out.append(
            (
                method,
                TrialRow(
                    trial=trial,
                    n_devices=n,
                    total_cost=rep.total_cost,
                    avg_cost=rep.total_cost / n,
                    avg_delay_s=math.fsum(c.delay_s for c in rep.costs) / n,
                    avg_energy_J=math.fsum(c.energy_J for c in rep.costs) / n,
                    offloading_rate=rep.offloading_rate,
                    wall_time_s=elapsed,
                ),
            )
        )
    return out


def run_trials(
    cfg: ExperimentConfig,
    n_trials: int | None = None,
    methods: Sequence[str] | None = None,
    n_devices: int | None = None,
    workers: int | None = None,
) -> dict[str, ExperimentResult]:
    """Solve ``n_trials`` random scenarios with each method.

    Trials are independent and may run in worker processes; results are
    merged by trial index so the output does not depend on ``workers``.
    """
    n_trials = cfg.experiment.trials if n_trials is None else n_trials
    methods = tuple(methods or cfg.experiment.methods)
    n_devices = cfg.devices.count if n_devices is None else n_devices
    workers = cfg.experiment.workers if workers is None else workers
    if n_trials < 1:
        raise ValueError(f"need at least one trial, got {n_trials}")
    jobs = [(cfg, n_devices, t, methods) for t in range(n_trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_trial = list(pool.map(_run_one, jobs))
    else:
        per_trial = [_run_one(j) for j in jobs]
    results = {m: ExperimentResult(m, []) for m in methods}
    for rows in per_trial:  # already in trial order
        for method, row in rows:
            results[method].rows.append(row)
    return results


def apply_axis(cfg: ExperimentConfig, axis: str, value: float) -> tuple[ExperimentConfig, int]:
    """Return the config and device count for one point of a sweep."""
    n = cfg.devices.count
    if axis == "device-count":
        if int(value) != value:
            raise ValueError(f"device count must be an integer, got {value}")
        return cfg, int(value)
    if axis == "bandwidth":
        return cfg.with_updates(system={"bandwidth_Hz": float(value)}), n
    if axis == "edge-compute":
        return cfg.with_updates(system={"f_edge_max_Hz": float(value)}), n
    if axis == "beta":
        return cfg.with_updates(system={"beta1": float(value), "beta2": 1.0 - float(value)}), n
    if axis == "accuracy":
        return cfg.with_updates(devices={"accuracy_req": float(value)}), n
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")


def sweep(
    cfg: ExperimentConfig,
    axis: str,
    values: Iterable[float],
    methods: Sequence[str] | None = None,
    n_trials: int | None = None,
    workers: int | None = None,
) -> list[tuple[float, dict[str, ExperimentResult]]]:
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    out = []
    for v in values:
        point_cfg, n = apply_axis(cfg, axis, v)
        out.append((v, run_trials(point_cfg, n_trials, methods, n, workers)))
    return out


SWEEP_COLUMNS = ("axis_value", "method", "avg_cost", "avg_delay_s", "avg_energy_J", "offloading_rate", "trials")
TRIAL_COLUMNS = (
    "axis_value",
    "method",
    "trial",
    "n_devices",
    "total_cost",
    "avg_cost",
    "avg_delay_s",
    "avg_energy_J",
    "offloading_rate",
)


def fmt(x) -> str:
    """Locale-independent, round-trippable number formatting."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_sweep_csv(out_dir: str | Path, axis: str, table) -> tuple[Path, Path]:
    """Write ``sweep_<axis>.csv`` (aggregates) and ``trials_<axis>.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    agg_path = out_dir / f"sweep_{axis}.csv"
    trial_path = out_dir / f"trials_{axis}.csv"
    with open(agg_path, "w", newline="") as fa, open(trial_path, "w", newline="") as ft:
        agg = csv.writer(fa, lineterminator="\n")
        per = csv.writer(ft, lineterminator="\n")
        agg.writerow(SWEEP_COLUMNS)
        per.writerow(TRIAL_COLUMNS)
        for value, results in table:
            for method, res in results.items():
                agg.writerow(
                    [fmt(value), method]
                    + [fmt(v) for v in (res.avg_cost, res.avg_delay_s, res.avg_energy_J, res.offloading_rate)]
                    + [res.trials]
                )
                for r in res.rows:
                    per.writerow(
                        [fmt(value), method, r.trial, r.n_devices]
                        + [fmt(v) for v in (r.total_cost, r.avg_cost, r.avg_delay_s, r.avg_energy_J, r.offloading_rate)]
                    )
    return agg_path, trial_path
