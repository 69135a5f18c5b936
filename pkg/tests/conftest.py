import pytest

from vidoffload.config import ExperimentConfig
from vidoffload.core import DeviceProfile, SystemConfig


@pytest.fixture
def cfg():
    return SystemConfig()


@pytest.fixture
def default_config():
    return ExperimentConfig()


def make_device(i=1, distance_km=0.2, **kw):
    base = dict(
        id=i,
        distance_km=distance_km,
        tx_power_W=0.1,
        frame_bits=112 * 112 * 3 * 8 * 0.05,
        f_local_max_Hz=1.8e9,
        accuracy_req=0.9,
        m_max=16,
    )
    base.update(kw)
    return DeviceProfile(**base)
