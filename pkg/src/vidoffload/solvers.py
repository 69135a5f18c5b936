"""Closed-form resource allocation for a fixed offloading decision.

Local devices each pick a CPU frequency independently. Offloaded devices
share the edge CPU and the uplink airtime; both splits are proportional to
square roots of the per-device load.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import DeviceProfile, InfeasibleAllocationError, SystemConfig

MIN_FREQUENCY_HZ = 1.0


@dataclass(frozen=True)
class LocalSolution:
    f_local_Hz: float
    cost: float
    degenerate: str | None = None  # "no-delay-weight" or "no-energy-weight"


def local_cost(cfg: SystemConfig, macs: float, f_local_Hz: float) -> float:
    cycles = cfg.rho_cycles_per_MAC * macs
    return cfg.beta1 * cycles / f_local_Hz + cfg.beta2 * cfg.kappa * cycles * f_local_Hz**2


def local_optimum_Hz(cfg: SystemConfig) -> float:
    """Unconstrained minimiser of the local cost; it does not depend on C(M)."""
    return (cfg.beta1 / (2.0 * cfg.beta2 * cfg.kappa)) ** (1.0 / 3.0)


def solve_local(dev: DeviceProfile, cfg: SystemConfig, macs: float) -> LocalSolution:
    """Optimal local CPU frequency and the resulting weighted cost.

    With a zero energy weight the cost keeps falling with ``f`` so the cap
    is used; with a zero delay weight it keeps falling as ``f -> 0`` and the
    1 Hz floor is returned. Both cases are flagged.
    """
    if not macs > 0:
        raise ValueError(f"MAC count must be positive, got {macs}")
    if cfg.beta2 == 0:
        f, flag = dev.f_local_max_Hz, "no-energy-weight"
    elif cfg.beta1 == 0:
        f, flag = MIN_FREQUENCY_HZ, "no-delay-weight"
    else:
        f, flag = min(local_optimum_Hz(cfg), dev.f_local_max_Hz), None
    return LocalSolution(f, local_cost(cfg, macs, f), flag)


@dataclass(frozen=True)
class EdgeSolution:
    f_edge_Hz: tuple[float, ...]
    time_share: tuple[float, ...]
    costs: tuple[float, ...]
    total_cost: float


def _weights(devices, frames, macs, rates) -> tuple[list[float], list[float]]:
    cpu, air = [], []
    for dev, m, c, r in zip(devices, frames, macs, rates, strict=True):
        if not r > 0:
            raise InfeasibleAllocationError(f"device {dev.id}: rate {r} must be positive")
        if not c > 0:
            raise ValueError(f"device {dev.id}: MAC count {c} must be positive")
        cpu.append(math.sqrt(c))
        air.append(math.sqrt(m * dev.frame_bits / r))
    return cpu, air


def edge_device_cost(
    dev: DeviceProfile, cfg: SystemConfig, frames: int, macs: float, rate: float, f_edge_Hz: float, time_share: float
) -> float:
    bits = frames * dev.frame_bits
    return (
        cfg.beta1 * cfg.rho_cycles_per_MAC * macs / f_edge_Hz
        + cfg.beta1 * bits / (rate * time_share)
        + cfg.beta2 * bits * dev.tx_power_W / rate
    )


def solve_edge(
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    frames: Sequence[int],
    macs: Sequence[float],
    rates: Sequence[float],
) -> EdgeSolution:
    """Split the edge CPU and the uplink airtime across offloaded devices.

    Edge CPU goes in proportion to ``sqrt(C_n)``, airtime in proportion to
    ``sqrt(M_n * d_n / R_n)``; both budgets are used in full.
    """
    if not devices:
        return EdgeSolution((), (), (), 0.0)
    cpu, air = _weights(devices, frames, macs, rates)
    cpu_sum, air_sum = math.fsum(cpu), math.fsum(air)
    f_edge = tuple(cfg.f_edge_max_Hz * w / cpu_sum for w in cpu)
    shares = tuple(w / air_sum for w in air)
    costs = tuple(
        edge_device_cost(d, cfg, m, c, r, f, t)
        for d, m, c, r, f, t in zip(devices, frames, macs, rates, f_edge, shares)
    )
    return EdgeSolution(f_edge, shares, costs, math.fsum(costs))


def edge_total_cost(
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    frames: Sequence[int],
    macs: Sequence[float],
    rates: Sequence[float],
) -> float:
    """Optimal edge-set cost without materialising the allocation.

    Substituting the proportional splits gives
    ``b1*rho*(sum sqrt C)^2 / f_max + b1*(sum sqrt(M d / R))^2 + b2*sum(M d p / R)``.
    """
    if not devices:
        return 0.0
    cpu, air = _weights(devices, frames, macs, rates)
    energy = math.fsum(m * d.frame_bits * d.tx_power_W / r for d, m, r in zip(devices, frames, rates))
    return (
        cfg.beta1 * cfg.rho_cycles_per_MAC * math.fsum(cpu) ** 2 / cfg.f_edge_max_Hz
        + cfg.beta1 * math.fsum(air) ** 2
        + cfg.beta2 * energy
    )


@dataclass(frozen=True)
class KKTReport:
    mu_time: float
    mu_cpu: float
    stationarity_cpu: float
    stationarity_time: float
    slackness_time: float
    slackness_cpu: float

    @property
    def max_residual(self) -> float:
        return max(self.stationarity_cpu, self.stationarity_time, self.slackness_time, self.slackness_cpu)


def kkt_residuals(
    f_edge_Hz: Sequence[float],
    time_share: Sequence[float],
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    frames: Sequence[int],
    macs: Sequence[float],
    rates: Sequence[float],
    reference: int = 0,
) -> KKTReport:
    """Relative first-order optimality residuals of an edge allocation.

    Multipliers of the airtime and CPU budgets are read off the stationarity
    condition of device ``reference``; every device is then checked against
    them. Stationarity residuals are relative to the multiplier, slackness
    residuals relative to the budget.
    """
    if not devices:
        return KKTReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    if min(f_edge_Hz) <= 0 or min(time_share) <= 0:
        raise ValueError("KKT check needs strictly positive frequencies and time shares")
    b1, rho = cfg.beta1, cfg.rho_cycles_per_MAC

    def cpu_marginal(i):
        return b1 * rho * macs[i] / f_edge_Hz[i] ** 2

    def air_marginal(i):
        return b1 * frames[i] * devices[i].frame_bits / (rates[i] * time_share[i] ** 2)

    mu_cpu, mu_time = cpu_marginal(reference), air_marginal(reference)
    n = len(devices)
    if b1 == 0:
        stat_cpu = stat_time = 0.0
    else:
        stat_cpu = max(abs(mu_cpu - cpu_marginal(i)) for i in range(n)) / mu_cpu
        stat_time = max(abs(mu_time - air_marginal(i)) for i in range(n)) / mu_time
    # both multipliers are positive whenever b1 > 0, so both budgets must be tight
    slack_time = abs(math.fsum(time_share) - 1.0) if mu_time > 0 else 0.0
    slack_cpu = abs(math.fsum(f_edge_Hz) / cfg.f_edge_max_Hz - 1.0) if mu_cpu > 0 else 0.0
    return KKTReport(mu_time, mu_cpu, stat_cpu, stat_time, slack_time, slack_cpu)
