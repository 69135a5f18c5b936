"""Binary offloading decisions: iterative greedy, exhaustive search, baselines.

Every method fixes the offloaded set and then hands the two halves to the
closed-form solvers, so they differ only in which set they pick.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    Allocation,
    AllocationEntry,
    CostBreakdown,
    DeviceProfile,
    InfeasibleAccuracyError,
    SystemConfig,
    device_costs,
)
from .dnn import AccuracyModel, ComplexityModel, min_frames
from .rng import RANDOM_OFFLOAD, stream
from .solvers import LocalSolution, edge_total_cost, solve_edge, solve_local

METHODS = ("greedy", "greedy-extended", "enumeration", "local-all", "edge-all", "random")
DEFAULT_ENUM_CAP = 14


class EnumerationCapError(ValueError):
    pass


@dataclass(frozen=True)
class Models:
    complexity: ComplexityModel
    accuracy: AccuracyModel


@dataclass(frozen=True)
class Workload:
    """Per-device quantities that do not depend on the offloading decision."""

    devices: tuple[DeviceProfile, ...]
    cfg: SystemConfig
    models: Models
    rates: tuple[float, ...]
    frames: tuple[int, ...]
    macs: tuple[float, ...]
    local: tuple[LocalSolution, ...]

    def subset(self, idx: Sequence[int]):
        return (
            [self.devices[i] for i in idx],
            self.cfg,
            [self.frames[i] for i in idx],
            [self.macs[i] for i in idx],
            [self.rates[i] for i in idx],
        )

    def cost_of(self, offloaded: Sequence[int]) -> float:
        chosen = set(offloaded)
        local = math.fsum(s.cost for i, s in enumerate(self.local) if i not in chosen)
        return local + edge_total_cost(*self.subset(sorted(chosen)))


def prepare(
    devices: Sequence[DeviceProfile], cfg: SystemConfig, models: Models, rates: Sequence[float]
) -> Workload:
    """Pick the minimum frame count per device and solve every local problem.

    Raises InfeasibleAccuracyError listing all devices that cannot meet
    their accuracy requirement.
    """
    frames, bad = [], []
    for dev in devices:
        try:
            frames.append(min_frames(models.accuracy, dev.accuracy_req, min(dev.m_max, models.complexity.m_max)))
        except InfeasibleAccuracyError:
            bad.append(dev.id)
    if bad:
        raise InfeasibleAccuracyError(f"devices {bad} cannot reach their accuracy requirement", bad)
    macs = [models.complexity.macs(m) for m in frames]
    local = [solve_local(d, cfg, c) for d, c in zip(devices, macs)]
    return Workload(tuple(devices), cfg, models, tuple(rates), tuple(frames), tuple(macs), tuple(local))


@dataclass
class SolveReport:
    allocation: Allocation
    total_cost: float
    method: str
    iterations: int = 0
    moves: list[int] = field(default_factory=list)
    history: list[float] = field(default_factory=list)  # committed totals, greedy only
    costs: list[CostBreakdown] = field(default_factory=list)

    @property
    def offloading_rate(self) -> float:
        return self.allocation.offloading_rate


def assemble(w: Workload, offloaded: Sequence[int], method: str, **extra) -> SolveReport:
    """Build the allocation for index set ``offloaded`` and cost it."""
    chosen = sorted(set(offloaded))
    edge = solve_edge(*w.subset(chosen))
    slot = {i: k for k, i in enumerate(chosen)}
    entries = []
    for i, dev in enumerate(w.devices):
        if i in slot:
            k = slot[i]
            entries.append(AllocationEntry.edge(dev.id, w.frames[i], edge.f_edge_Hz[k], edge.time_share[k]))
        else:
            entries.append(AllocationEntry.local(dev.id, w.frames[i], w.local[i].f_local_Hz))
    alloc = Allocation(tuple(entries))
    costs = device_costs(w.devices, w.cfg, alloc, w.rates, w.models.complexity)
    return SolveReport(alloc, math.fsum(c.weighted for c in costs), method, costs=costs, **extra)


def greedy_offload(
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    models: Models,
    rates: Sequence[float],
    extended: bool = False,
) -> SolveReport:
    """Start with everyone offloaded and peel devices off to local execution.

    Each round takes the offloaded device whose edge cost exceeds its local
    cost by the most (ties: smallest id) and moves it local if that strictly
    lowers the total. The first rejected move ends the search. With
    ``extended`` the remaining devices are probed in descending order of
    that difference before giving up.
    """
    w = prepare(devices, cfg, models, rates)
    on_edge = list(range(len(devices)))
    local_sum = 0.0  # running sum of local costs of devices moved off the edge
    edge = solve_edge(*w.subset(on_edge))
    current = edge.total_cost
    history = [current]
    moves: list[int] = []
    iterations = 0
    while on_edge:
        iterations += 1
        gain = {i: edge.costs[k] - w.local[i].cost for k, i in enumerate(on_edge)}
        ranked = sorted(on_edge, key=lambda i: (-gain[i], devices[i].id))
        for k in ranked if extended else ranked[:1]:
            rest = [i for i in on_edge if i != k]
            trial_edge = solve_edge(*w.subset(rest))
            trial = local_sum + w.local[k].cost + trial_edge.total_cost
            if trial < current:
                on_edge, edge, current = rest, trial_edge, trial
                local_sum += w.local[k].cost
                moves.append(devices[k].id)
                history.append(current)
                break
        else:
            break
    return assemble(
        w, on_edge, "greedy-extended" if extended else "greedy", iterations=iterations, moves=moves, history=history
    )


def enumerate_offload(
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    models: Models,
    rates: Sequence[float],
    cap: int = DEFAULT_ENUM_CAP,
) -> SolveReport:
    """Exact optimum over all 2**N offloading sets.

    Sets are visited by size, then lexicographically, and only a strictly
    better cost replaces the incumbent, which gives the tie-break.
    """
    n = len(devices)
    if n > cap:
        raise EnumerationCapError(f"enumeration over {n} devices exceeds the cap of {cap}")
    w = prepare(devices, cfg, models, rates)
    best, best_set = math.inf, ()
    order = sorted(range(n), key=lambda i: devices[i].id)
    visited = 0
    for size in range(n + 1):
        for subset in itertools.combinations(order, size):
            visited += 1
            cost = w.cost_of(subset)
            if cost < best:
                best, best_set = cost, subset
    return assemble(w, best_set, "enumeration", iterations=visited)


def baseline(
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    models: Models,
    rates: Sequence[float],
    kind: str,
    p: float = 0.5,
    seed: int = 0,
    trial: int = 0,
) -> SolveReport:
    """``local-all``, ``edge-all`` or ``random`` offloading with probability ``p``."""
    w = prepare(devices, cfg, models, rates)
    if kind == "local-all":
        return assemble(w, [], kind)
    if kind == "edge-all":
        return assemble(w, range(len(devices)), kind)
    if kind == "random":
        if not 0 <= p <= 1:
            raise ValueError(f"offloading probability must lie in [0, 1], got {p}")
        chosen = [i for i, d in enumerate(devices) if stream(seed, trial, d.id, RANDOM_OFFLOAD).random() < p]
        return assemble(w, chosen, kind)
    raise ValueError(f"unknown baseline {kind!r}")


def solve(
    method: str,
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    models: Models,
    rates: Sequence[float],
    *,
    p: float = 0.5,
    seed: int = 0,
    trial: int = 0,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> SolveReport:
    if method == "greedy":
        return greedy_offload(devices, cfg, models, rates)
    if method == "greedy-extended":
        return greedy_offload(devices, cfg, models, rates, extended=True)
    if method == "enumeration":
        return enumerate_offload(devices, cfg, models, rates, cap=enum_cap)
    if method in ("local-all", "edge-all", "random"):
        return baseline(devices, cfg, models, rates, method, p=p, seed=seed, trial=trial)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
