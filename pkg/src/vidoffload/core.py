"""Domain types, the weighted delay/energy objective and feasibility checks.

Everything here is SI: hertz, seconds, joules, bits, watts. An allocation
stores the offloading flag as a bool and picks a branch of the cost model
instead of multiplying by 0/1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

EPS = 1e-9  # relative slack on resource budgets


class InfeasibleAllocationError(ValueError):
    """An allocation entry cannot be costed (zero frequency, zero share, ...)."""


class InfeasibleAccuracyError(ValueError):
    """A device cannot reach its accuracy requirement within its frame limit."""

    def __init__(self, message: str, device_ids: Sequence[int] = ()):
        super().__init__(message)
        self.device_ids = list(device_ids)


class SupportsMacs(Protocol):
    def macs(self, frames: int) -> float: ...


class SupportsAccuracy(Protocol):
    def accuracy(self, frames: int) -> float: ...


def _check_positive(obj, names: Iterable[str]) -> None:
    for name in names:
        value = getattr(obj, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ValueError(f"{type(obj).__name__}.{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class DeviceProfile:
    id: int
    distance_km: float
    tx_power_W: float
    frame_bits: float
    f_local_max_Hz: float
    accuracy_req: float
    m_max: int

    def __post_init__(self):
        _check_positive(self, ("distance_km", "tx_power_W", "frame_bits", "f_local_max_Hz"))
        if not 0 < self.accuracy_req <= 1:
            raise ValueError(f"accuracy_req must lie in (0, 1], got {self.accuracy_req}")
        if int(self.m_max) != self.m_max or self.m_max < 1:
            raise ValueError(f"m_max must be a positive integer, got {self.m_max}")


@dataclass(frozen=True)
class SystemConfig:
    bandwidth_Hz: float = 5e6
    noise_psd_dBm_per_Hz: float = -174.0
    f_edge_max_Hz: float = 22e9
    rho_cycles_per_MAC: float = 0.12
    kappa: float = 1e-28
    beta1: float = 0.5
    beta2: float = 0.5
    area_m: float = 500.0
    pathloss_intercept_dB: float = 128.1
    pathloss_slope: float = 37.6

    def __post_init__(self):
        _check_positive(
            self,
            ("bandwidth_Hz", "f_edge_max_Hz", "rho_cycles_per_MAC", "kappa", "area_m", "pathloss_slope"),
        )
        if self.beta1 < 0 or self.beta2 < 0:
            raise ValueError(f"weights must be nonnegative, got ({self.beta1}, {self.beta2})")
        if abs(self.beta1 + self.beta2 - 1.0) > 1e-9:
            raise ValueError(f"beta1 + beta2 must equal 1, got {self.beta1 + self.beta2}")

    def channel(self):
        from .wireless import ChannelParams

        return ChannelParams(
            bandwidth_Hz=self.bandwidth_Hz,
            noise_psd_dBm_per_Hz=self.noise_psd_dBm_per_Hz,
            pathloss_intercept_dB=self.pathloss_intercept_dB,
            pathloss_slope=self.pathloss_slope,
        )


@dataclass(frozen=True)
class AllocationEntry:
    device_id: int
    offload: bool
    frames: int
    f_local_Hz: float = 0.0
    f_edge_Hz: float = 0.0
    time_share: float = 0.0

    @classmethod
    def local(cls, device_id: int, frames: int, f_local_Hz: float) -> "AllocationEntry":
        return cls(device_id, False, frames, f_local_Hz=f_local_Hz)

    @classmethod
    def edge(cls, device_id: int, frames: int, f_edge_Hz: float, time_share: float) -> "AllocationEntry":
        return cls(device_id, True, frames, f_edge_Hz=f_edge_Hz, time_share=time_share)


@dataclass(frozen=True)
class Allocation:
    entries: tuple[AllocationEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def by_device(self) -> dict[int, AllocationEntry]:
        return {e.device_id: e for e in self.entries}

    @property
    def offloaded(self) -> list[int]:
        return [e.device_id for e in self.entries if e.offload]

    @property
    def offloading_rate(self) -> float:
        return len(self.offloaded) / len(self.entries) if self.entries else 0.0


@dataclass(frozen=True)
class CostBreakdown:
    delay_s: float
    energy_J: float
    weighted: float

    @classmethod
    def of(cls, delay_s: float, energy_J: float, cfg: SystemConfig) -> "CostBreakdown":
        return cls(delay_s, energy_J, cfg.beta1 * delay_s + cfg.beta2 * energy_J)


def device_cost(
    dev: DeviceProfile,
    cfg: SystemConfig,
    entry: AllocationEntry,
    rate_bps: float,
    complexity: SupportsMacs,
) -> CostBreakdown:
    """Delay, energy and weighted cost of one device under ``entry``.

    Local: compute delay ``rho*C/f`` and energy ``kappa*rho*C*f**2``.
    Edge: compute delay at the edge plus TDMA upload delay; the device only
    pays upload energy.
    """
    cycles = cfg.rho_cycles_per_MAC * complexity.macs(entry.frames)
    if not entry.offload:
        f = entry.f_local_Hz
        if not f > 0:
            raise InfeasibleAllocationError(f"device {dev.id}: local frequency {f} must be positive")
        return CostBreakdown.of(cycles / f, cfg.kappa * cycles * f * f, cfg)

    from .wireless import tx_delay_energy

    if not entry.f_edge_Hz > 0:
        raise InfeasibleAllocationError(f"device {dev.id}: edge frequency {entry.f_edge_Hz} must be positive")
    if not entry.time_share > 0:
        raise InfeasibleAllocationError(f"device {dev.id}: time share {entry.time_share} must be positive")
    tx_delay, tx_energy = tx_delay_energy(entry.frames, dev.frame_bits, rate_bps, entry.time_share, dev.tx_power_W)
    return CostBreakdown.of(cycles / entry.f_edge_Hz + tx_delay, tx_energy, cfg)


def device_costs(
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    alloc: Allocation,
    rates: Sequence[float],
    complexity: SupportsMacs,
) -> list[CostBreakdown]:
    entries = alloc.by_device()
    out = []
    for dev, rate in zip(devices, rates, strict=True):
        if dev.id not in entries:
            raise InfeasibleAllocationError(f"allocation has no entry for device {dev.id}")
        out.append(device_cost(dev, cfg, entries[dev.id], rate, complexity))
    return out


def total_cost(
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    alloc: Allocation,
    rates: Sequence[float],
    complexity: SupportsMacs,
) -> float:
    return math.fsum(c.weighted for c in device_costs(devices, cfg, alloc, rates, complexity))


@dataclass(frozen=True)
class Violation:
    constraint: str
    device_id: int | None
    margin: float
    message: str = field(default="", compare=False)

    def __str__(self):
        who = "system" if self.device_id is None else f"device {self.device_id}"
        return f"[{self.constraint}] {who}: {self.message} (margin {self.margin:.6g})"


def validate(
    devices: Sequence[DeviceProfile],
    cfg: SystemConfig,
    alloc: Allocation,
    accuracy: SupportsAccuracy | None = None,
) -> list[Violation]:
    """List every constraint ``alloc`` breaks; empty iff it is feasible.

    Margins are positive amounts by which a limit is exceeded. Budgets get a
    relative slack of ``EPS`` since closed-form solutions sit on them.
    """
    out: list[Violation] = []
    entries: dict[int, AllocationEntry] = {}
    for e in alloc:
        if e.device_id in entries:
            out.append(Violation("coverage", e.device_id, 1.0, "duplicate allocation entry"))
        entries[e.device_id] = e
    known = {d.id for d in devices}
    for extra in sorted(set(entries) - known):
        out.append(Violation("coverage", extra, 1.0, "entry for unknown device"))

    time_sum = 0.0
    edge_sum = 0.0
    for dev in devices:
        e = entries.get(dev.id)
        if e is None:
            out.append(Violation("coverage", dev.id, 1.0, "device has no allocation entry"))
            continue
        if int(e.frames) != e.frames or e.frames < 1:
            out.append(Violation("frame-limit", dev.id, 1.0 - e.frames, f"frames {e.frames} not a positive integer"))
        elif e.frames > dev.m_max:
            out.append(Violation("frame-limit", dev.id, e.frames - dev.m_max, f"frames {e.frames} > {dev.m_max}"))
        elif accuracy is not None:
            acc = accuracy.accuracy(int(e.frames))
            if acc < dev.accuracy_req:
                out.append(
                    Violation("accuracy", dev.id, dev.accuracy_req - acc, f"accuracy {acc:.6g} < {dev.accuracy_req}")
                )
        if min(e.f_local_Hz, e.f_edge_Hz, e.time_share) < 0:
            out.append(
                Violation("nonnegative", dev.id, -min(e.f_local_Hz, e.f_edge_Hz, e.time_share), "negative resource")
            )
        if e.offload:
            if e.f_local_Hz != 0:
                out.append(Violation("branch", dev.id, abs(e.f_local_Hz), "offloaded device holds a local frequency"))
            if not e.f_edge_Hz > 0:
                out.append(Violation("edge-frequency", dev.id, -e.f_edge_Hz, "offloaded device has no edge CPU"))
            if not e.time_share > 0:
                out.append(Violation("time-share", dev.id, -e.time_share, "offloaded device has no airtime"))
            time_sum += e.time_share
            edge_sum += e.f_edge_Hz
        else:
            if e.f_edge_Hz != 0 or e.time_share != 0:
                out.append(
                    Violation("branch", dev.id, abs(e.f_edge_Hz) + abs(e.time_share), "local device holds edge resources")
                )
            if not e.f_local_Hz > 0:
                out.append(Violation("local-frequency", dev.id, -e.f_local_Hz, "local frequency must be positive"))
            elif e.f_local_Hz > dev.f_local_max_Hz * (1 + EPS):
                out.append(
                    Violation(
                        "local-frequency",
                        dev.id,
                        e.f_local_Hz - dev.f_local_max_Hz,
                        f"{e.f_local_Hz:.6g} Hz > max {dev.f_local_max_Hz:.6g} Hz",
                    )
                )
    if time_sum > 1 + EPS:
        out.append(Violation("time-budget", None, time_sum - 1, f"time shares sum to {time_sum:.6g} > 1"))
    if edge_sum > cfg.f_edge_max_Hz * (1 + EPS):
        out.append(
            Violation(
                "edge-budget",
                None,
                edge_sum - cfg.f_edge_max_Hz,
                f"edge frequencies sum to {edge_sum:.6g} Hz > {cfg.f_edge_max_Hz:.6g} Hz",
            )
        )
    return out
