import math

import pytest
from hypothesis import given, strategies as st
from pytest import approx

from conftest import make_device
from vidoffload.core import InfeasibleAllocationError
from vidoffload.wireless import ChannelParams, achievable_rate_bps, path_loss_dB, snr, tx_delay_energy

CH = ChannelParams(bandwidth_Hz=5e6, noise_psd_dBm_per_Hz=-174.0)


def test_path_loss_values():
    assert path_loss_dB(1.0) == approx(128.1)
    assert path_loss_dB(0.1) == approx(90.5)
    assert path_loss_dB(0.5) == approx(116.78127216303431, rel=1e-12)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_path_loss_domain(d):
    with pytest.raises(ValueError):
        path_loss_dB(d)


def _distance_for_snr(target, p=0.1, ch=CH):
    # invert the path-loss law for a given SNR
    pl = 10 * math.log10(p / (target * ch.noise_power_W))
    return 10 ** ((pl - ch.pathloss_intercept_dB) / ch.pathloss_slope)


@pytest.mark.parametrize("target, factor", [(1.0, 1.0), (3.0, 2.0)])
def test_rate_at_unit_snr(target, factor):
    dev = make_device(distance_km=_distance_for_snr(target))
    assert achievable_rate_bps(dev, CH) == approx(factor * CH.bandwidth_Hz, rel=1e-9)


def test_rate_golden():
    # 30-digit SNR arithmetic done separately: noise 1.99053585e-14 W, SNR 10.54150889
    dev = make_device(distance_km=0.5, tx_power_W=0.1)
    assert snr(0.5, 0.1, CH) == approx(10.5415088902818175, rel=1e-12)
    assert achievable_rate_bps(dev, CH) == approx(17643799.71663417, rel=1e-12)


@given(st.floats(0.001, 2.0), st.floats(0.001, 2.0))
def test_rate_decreasing_in_distance(d1, d2):
    near, far = sorted((d1, d2))
    r_near = achievable_rate_bps(make_device(distance_km=near), CH)
    r_far = achievable_rate_bps(make_device(distance_km=far), CH)
    assert r_near >= r_far
    # inputs a few ulps apart can round to the same rate
    if far > near * (1 + 1e-9):
        assert path_loss_dB(near) < path_loss_dB(far)
        assert r_near > r_far


@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_rate_increasing_in_power(p1, p2):
    lo, hi = sorted((p1, p2))
    r_lo = achievable_rate_bps(make_device(tx_power_W=lo), CH)
    r_hi = achievable_rate_bps(make_device(tx_power_W=hi), CH)
    assert r_lo <= r_hi
    if hi > lo * (1 + 1e-9):
        assert r_lo < r_hi


def test_rate_increasing_in_bandwidth():
    dev = make_device(distance_km=0.3)
    rates = [achievable_rate_bps(dev, ChannelParams(bandwidth_Hz=b * 1e6)) for b in range(1, 21)]
    assert all(a < b for a, b in zip(rates, rates[1:]))


def test_tx_examples():
    assert tx_delay_energy(1, 1e6, 1e6, 1.0, 0.1) == approx((1.0, 0.1))
    assert tx_delay_energy(1, 1e6, 1e6, 0.5, 0.1) == approx((2.0, 0.1))
    assert tx_delay_energy(1, 8e5, 2e6, 0.25, 0.2) == approx((1.6, 0.08))


@given(st.floats(1e-3, 1.0))
def test_tx_energy_ignores_share(t):
    d1, e1 = tx_delay_energy(4, 2e5, 3e7, 1.0, 0.1)
    d, e = tx_delay_energy(4, 2e5, 3e7, t, 0.1)
    assert e == e1
    assert d == approx(d1 / t, rel=1e-12)


@pytest.mark.parametrize("t", [0.0, -0.1, 1.5])
def test_tx_bad_share(t):
    with pytest.raises(InfeasibleAllocationError):
        tx_delay_energy(1, 1e6, 1e6, t, 0.1)


def test_channel_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(bandwidth_Hz=0)
    with pytest.raises(ValueError):
        ChannelParams(pathloss_slope=0)
