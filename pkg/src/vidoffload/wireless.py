"""Uplink rate model and TDMA transmission cost.

Rates follow Shannon capacity over the whole band with a deterministic
log-distance path loss (no fading, no antenna gain). All quantities are SI
once they leave this module; dB and dBm only appear in the parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DeviceProfile, InfeasibleAllocationError


def dbm_to_watt(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    bandwidth_Hz: float = 5e6
    noise_psd_dBm_per_Hz: float = -174.0
    pathloss_intercept_dB: float = 128.1
    pathloss_slope: float = 37.6  # dB per decade of km

    def __post_init__(self):
        if not self.bandwidth_Hz > 0:
            raise ValueError(f"bandwidth_Hz must be positive, got {self.bandwidth_Hz}")
        if not self.pathloss_slope > 0:
            raise ValueError(f"pathloss_slope must be positive, got {self.pathloss_slope}")

    @property
    def noise_power_W(self) -> float:
        return dbm_to_watt(self.noise_psd_dBm_per_Hz) * self.bandwidth_Hz


def path_loss_dB(distance_km: float, ch: ChannelParams | None = None) -> float:
    ch = ch or ChannelParams()
    if not distance_km > 0:
        raise ValueError(f"distance must be positive, got {distance_km} km")
    return ch.pathloss_intercept_dB + ch.pathloss_slope * math.log10(distance_km)


def snr(distance_km: float, tx_power_W: float, ch: ChannelParams) -> float:
    gain = 1.0 / db_to_linear(path_loss_dB(distance_km, ch))
    return tx_power_W * gain / ch.noise_power_W


def achievable_rate_bps(dev: DeviceProfile, ch: ChannelParams) -> float:
    """Instantaneous uplink rate of ``dev`` while it holds the channel."""
    return ch.bandwidth_Hz * math.log2(1.0 + snr(dev.distance_km, dev.tx_power_W, ch))


def tx_delay_energy(
    frames: int,
    frame_bits: float,
    rate_bps: float,
    time_share: float,
    tx_power_W: float,
) -> tuple[float, float]:
    """Upload delay and energy for ``frames`` frames under a TDMA share.

    The device radiates only during its own slots, so the airtime (and the
    energy) is ``bits / rate`` whatever the share; the share stretches the
    wall-clock delay by ``1 / time_share``.
    """
    if not rate_bps > 0:
        raise InfeasibleAllocationError(f"non-positive rate {rate_bps}")
    if not 0 < time_share <= 1 + 1e-9:
        raise InfeasibleAllocationError(f"time share {time_share} outside (0, 1]")
    airtime = frames * frame_bits / rate_bps
    return airtime / time_share, airtime * tx_power_W
