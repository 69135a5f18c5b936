import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pytest import approx

from conftest import make_device
from vidoffload.core import (
    Allocation,
    AllocationEntry,
    DeviceProfile,
    InfeasibleAllocationError,
    SystemConfig,
    device_cost,
    total_cost,
    validate,
)
from vidoffload.dnn import AffineComplexity, SaturatingAccuracy

HALF = SystemConfig(beta1=0.5, beta2=0.5, kappa=1e-28, rho_cycles_per_MAC=0.12)
FLAT_1G = AffineComplexity(1e9, 0.0)  # C(M) = 1e9 whatever M


def test_local_branch_hand_values():
    dev = make_device()
    c = device_cost(dev, HALF, AllocationEntry.local(1, 1, 1.2e9), 0.0, FLAT_1G)
    assert c.delay_s == approx(0.1, rel=1e-12)
    assert c.energy_J == approx(0.01728, rel=1e-12)
    assert c.weighted == approx(0.05864, rel=1e-12)


def test_edge_branch_hand_values():
    dev = make_device(frame_bits=1e6)
    entry = AllocationEntry.edge(1, 1, 2e9, 0.5)
    c = device_cost(dev, HALF, entry, 1e7, FLAT_1G)
    assert c.delay_s == approx(0.26, rel=1e-12)
    assert c.energy_J == approx(0.01, rel=1e-12)


def test_zero_share_is_infeasible():
    with pytest.raises(InfeasibleAllocationError):
        device_cost(make_device(), HALF, AllocationEntry.edge(1, 1, 2e9, 0.0), 1e7, FLAT_1G)
    with pytest.raises(InfeasibleAllocationError):
        device_cost(make_device(), HALF, AllocationEntry.local(1, 1, 0.0), 0.0, FLAT_1G)


def test_weighted_is_exact_combination():
    c = device_cost(make_device(), HALF, AllocationEntry.local(1, 1, 1.0e9), 0.0, FLAT_1G)
    assert c.weighted == HALF.beta1 * c.delay_s + HALF.beta2 * c.energy_J


def test_total_cost_examples():
    assert total_cost([], HALF, Allocation(), [], FLAT_1G) == 0
    a = make_device(1)
    b = make_device(2, frame_bits=1e6)
    one = Allocation([AllocationEntry.local(1, 1, 1.2e9)])
    assert total_cost([a], HALF, one, [1.0], FLAT_1G) == device_cost(a, HALF, one.entries[0], 1.0, FLAT_1G).weighted
    two = Allocation([AllocationEntry.local(1, 1, 1.2e9), AllocationEntry.edge(2, 1, 2e9, 0.5)])
    assert total_cost([a, b], HALF, two, [1.0, 1e7], FLAT_1G) == approx(0.19364, rel=1e-12)


def test_total_cost_missing_entry():
    with pytest.raises(InfeasibleAllocationError):
        total_cost([make_device(1), make_device(2)], HALF, Allocation([AllocationEntry.local(1, 1, 1e9)]), [1, 1], FLAT_1G)


@settings(max_examples=50)
@given(st.permutations(range(5)))
def test_total_cost_order_invariant(perm):
    devs = [make_device(i + 1, distance_km=0.05 * (i + 1)) for i in range(5)]
    entries = [
        AllocationEntry.local(1, 3, 1e9),
        AllocationEntry.edge(2, 4, 5e9, 0.3),
        AllocationEntry.local(3, 6, 1.7e9),
        AllocationEntry.edge(4, 2, 7e9, 0.6),
        AllocationEntry.local(5, 1, 0.5e9),
    ]
    rates = [2e7, 3e7, 4e7, 5e7, 6e7]
    cx = AffineComplexity(1e8, 4e8)
    base = total_cost(devs, HALF, Allocation(entries), rates, cx)
    shuffled = total_cost(
        [devs[i] for i in perm], HALF, Allocation([entries[i] for i in perm]), [rates[i] for i in perm], cx
    )
    assert shuffled == approx(base, rel=1e-14)


def test_local_cost_strictly_convex_in_frequency():
    f = np.linspace(1e8, 5e9, 400)
    cycles = 0.12 * 2e9
    cost = 0.5 * cycles / f + 0.5 * 1e-28 * cycles * f**2
    second = cost[:-2] - 2 * cost[1:-1] + cost[2:]
    assert np.all(second > 0)


def test_validate_clean_local():
    acc = SaturatingAccuracy()
    devs = [make_device(1), make_device(2)]
    alloc = Allocation([AllocationEntry.local(1, 6, 1.7e9), AllocationEntry.local(2, 6, 1.8e9)])
    assert validate(devs, HALF, alloc, acc) == []


def test_validate_time_budget_margin():
    devs = [make_device(1), make_device(2)]
    alloc = Allocation([AllocationEntry.edge(1, 6, 1e9, 0.6), AllocationEntry.edge(2, 6, 1e9, 0.6)])
    v = validate(devs, HALF, alloc)
    assert [x.constraint for x in v] == ["time-budget"]
    assert v[0].margin == approx(0.2, rel=1e-12)


def test_validate_accuracy_violation():
    acc = SaturatingAccuracy()
    v = validate([make_device(1)], HALF, Allocation([AllocationEntry.local(1, 5, 1e9)]), acc)
    assert [x.constraint for x in v] == ["accuracy"]
    assert v[0].margin == approx(0.9 - acc.accuracy(5))


@pytest.mark.parametrize(
    "entry, constraint",
    [
        (AllocationEntry.local(1, 6, 2.0e9), "local-frequency"),
        (AllocationEntry.local(1, 6, 0.0), "local-frequency"),
        (AllocationEntry.local(1, 17, 1e9), "frame-limit"),
        (AllocationEntry.local(1, 0, 1e9), "frame-limit"),
        (AllocationEntry(1, False, 6, 1e9, 1e9, 0.0), "branch"),
        (AllocationEntry(1, True, 6, 1e9, 1e9, 0.5), "branch"),
        (AllocationEntry.edge(1, 6, 23e9, 0.5), "edge-budget"),
        (AllocationEntry.edge(1, 6, 1e9, 0.0), "time-share"),
    ],
)
def test_validate_catches(entry, constraint):
    v = validate([make_device(1)], HALF, Allocation([entry]))
    assert constraint in {x.constraint for x in v}


def test_validate_coverage():
    v = validate([make_device(1), make_device(2)], HALF, Allocation([AllocationEntry.local(1, 6, 1e9)]))
    assert [(x.constraint, x.device_id) for x in v] == [("coverage", 2)]


def test_budget_tolerance():
    devs = [make_device(1), make_device(2)]
    tight = Allocation([AllocationEntry.edge(1, 6, 11e9, 0.5 + 1e-12), AllocationEntry.edge(2, 6, 11e9 * (1 + 1e-12), 0.5)])
    assert validate(devs, HALF, tight) == []


@settings(max_examples=100)
@given(
    st.lists(
        st.tuples(st.booleans(), st.floats(0, 2e9), st.floats(0, 2e10), st.floats(0, 0.8), st.integers(0, 17)),
        min_size=1,
        max_size=4,
    )
)
def test_validate_agrees_with_total_cost(raw):
    """A clean validation report means the allocation can be costed."""
    devs = [make_device(i + 1) for i in range(len(raw))]
    entries = []
    for i, (off, fl, fe, t, m) in enumerate(raw):
        entries.append(AllocationEntry.edge(i + 1, m, fe, t) if off else AllocationEntry.local(i + 1, m, fl))
    alloc = Allocation(entries)
    cx = AffineComplexity(1e8, 4e8, m_max=20)
    if not validate(devs, HALF, alloc):
        assert total_cost(devs, HALF, alloc, [3e7] * len(devs), cx) > 0


@pytest.mark.parametrize(
    "bad",
    [dict(distance_km=0), dict(tx_power_W=-1), dict(accuracy_req=1.2), dict(accuracy_req=0), dict(m_max=0)],
)
def test_device_profile_rejects(bad):
    with pytest.raises(ValueError):
        make_device(**bad)


def test_system_config_weights():
    with pytest.raises(ValueError):
        SystemConfig(beta1=0.6, beta2=0.6)
    with pytest.raises(ValueError):
        SystemConfig(beta1=-0.1, beta2=1.1)
    SystemConfig(beta1=0.7, beta2=1 - 0.7)
