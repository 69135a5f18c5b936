import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pytest import approx

from conftest import make_device
from vidoffload.config import ExperimentConfig
from vidoffload.core import InfeasibleAccuracyError, SystemConfig, validate
from vidoffload.dnn import SaturatingAccuracy
from vidoffload.experiment import generate_scenario
from vidoffload.offload import (
    EnumerationCapError,
    Models,
    baseline,
    enumerate_offload,
    greedy_offload,
    prepare,
)
from vidoffload.wireless import achievable_rate_bps

BASE = ExperimentConfig()
MODELS = BASE.models()
CFG = BASE.system


def rates_for(devices, cfg=CFG):
    ch = cfg.channel()
    return [achievable_rate_bps(d, ch) for d in devices]


def scenario(n, trial=0, seed=7, cfg=BASE):
    sc = generate_scenario(seed, n, cfg, trial)
    return sc.devices, cfg.system, sc.models, sc.rates


def test_single_device_stays_offloaded():
    devs = [make_device(1, distance_km=0.1)]
    rep = greedy_offload(devs, CFG, MODELS, rates_for(devs))
    assert rep.allocation.offloaded == [1]
    assert rep.iterations == 1 and rep.moves == []
    assert rep.method == "greedy"


def test_single_far_device_goes_local():
    devs = [make_device(1, distance_km=40.0)]
    rates = rates_for(devs)
    rep = greedy_offload(devs, CFG, MODELS, rates)
    assert rep.allocation.offloaded == []
    assert rep.moves == [1] and rep.iterations == 1
    w = prepare(devs, CFG, MODELS, rates)
    assert w.cost_of([0]) > w.cost_of([])  # edge really is worse
    assert enumerate_offload(devs, CFG, MODELS, rates).total_cost == approx(rep.total_cost, rel=1e-12)


def test_enumeration_empty():
    rep = enumerate_offload([], CFG, MODELS, [])
    assert rep.total_cost == 0.0 and len(rep.allocation) == 0


def test_enumeration_tie_break_identical_pair():
    # a small edge server makes exactly one of two identical devices worth offloading
    cfg = SystemConfig(f_edge_max_Hz=2.6e9)
    devs = [make_device(1, distance_km=0.05), make_device(2, distance_km=0.05)]
    rates = rates_for(devs, cfg)
    w = prepare(devs, cfg, MODELS, rates)
    costs = {s: w.cost_of(s) for s in [(), (0,), (1,), (0, 1)]}
    assert costs[(0,)] == costs[(1,)]
    assert min(costs, key=costs.get) == (0,)
    rep = enumerate_offload(devs, cfg, MODELS, rates)
    assert rep.allocation.offloaded == [1]


def test_enumeration_matches_brute_force_listing():
    devs, cfg, models, rates = scenario(6)
    w = prepare(devs, cfg, models, rates)
    subsets = [s for k in range(7) for s in itertools.combinations(range(6), k)]
    best = min(subsets, key=lambda s: (w.cost_of(s), len(s), s))
    rep = enumerate_offload(devs, cfg, models, rates)
    assert rep.allocation.offloaded == [devs[i].id for i in best]


def test_enumeration_cap():
    devs, cfg, models, rates = scenario(15)
    with pytest.raises(EnumerationCapError):
        enumerate_offload(devs, cfg, models, rates)
    with pytest.raises(EnumerationCapError):
        enumerate_offload(devs[:5], cfg, models, rates[:5], cap=4)


def test_defaults_small_n_all_offload():
    for trial in range(5):
        rep = enumerate_offload(*scenario(8, trial))
        assert rep.offloading_rate == 1.0


@pytest.mark.parametrize("seed", range(30))
def test_enumeration_le_greedy_le_edge(seed):
    rng = np.random.default_rng(seed)
    args = scenario(int(rng.integers(1, 11)), trial=seed, seed=99)
    enum = enumerate_offload(*args).total_cost
    greedy = greedy_offload(*args)
    edge = baseline(*args, "edge-all").total_cost
    assert enum <= greedy.total_cost * (1 + 1e-12)
    assert greedy.total_cost <= edge * (1 + 1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 24), st.integers(0, 1000))
def test_greedy_history_and_termination(n, trial):
    devs, cfg, models, rates = scenario(n, trial)
    rep = greedy_offload(devs, cfg, models, rates)
    assert all(b < a for a, b in zip(rep.history, rep.history[1:]))
    assert rep.iterations <= n
    assert len(rep.moves) == len(rep.history) - 1
    assert rep.total_cost == approx(rep.history[-1], rel=1e-12)
    assert validate(devs, cfg, rep.allocation, models.accuracy) == []


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 20), st.integers(0, 1000))
def test_extended_greedy_not_worse(n, trial):
    args = scenario(n, trial)
    plain = greedy_offload(*args)
    ext = greedy_offload(*args, extended=True)
    assert ext.method == "greedy-extended"
    assert ext.total_cost <= plain.total_cost * (1 + 1e-12)


def test_local_all_cost_independent_of_n():
    per_device = []
    for n in (4, 12, 24):
        rep = baseline(*scenario(n), "local-all")
        per_device.append(rep.total_cost / n)
        assert rep.offloading_rate == 0.0
    assert per_device == approx([per_device[0]] * 3, rel=1e-12)


def test_edge_all_identical_devices_quadratic():
    """Each device gets 1/N of both budgets: total = N*const + N^2*shared."""
    totals = {}
    for n in (1, 2, 3, 6):
        devs = [make_device(i + 1, distance_km=0.2) for i in range(n)]
        totals[n] = baseline(devs, CFG, MODELS, rates_for(devs), "edge-all").total_cost
    dev = make_device(1, distance_km=0.2)
    rate = rates_for([dev])[0]
    m = 6
    c = MODELS.complexity.macs(m)
    shared = CFG.beta1 * (CFG.rho_cycles_per_MAC * c / CFG.f_edge_max_Hz + m * dev.frame_bits / rate)
    const = CFG.beta2 * m * dev.frame_bits * dev.tx_power_W / rate
    for n, total in totals.items():
        assert total == approx(n * const + n * n * shared, rel=1e-12)


def test_random_extremes():
    args = scenario(10)
    local = baseline(*args, "local-all")
    edge = baseline(*args, "edge-all")
    assert baseline(*args, "random", p=0.0, seed=3).allocation == local.allocation
    assert baseline(*args, "random", p=1.0, seed=3).allocation == edge.allocation


def test_random_is_seeded():
    args = scenario(20)
    a = baseline(*args, "random", p=0.5, seed=5, trial=2)
    b = baseline(*args, "random", p=0.5, seed=5, trial=2)
    c = baseline(*args, "random", p=0.5, seed=6, trial=2)
    assert a.allocation == b.allocation
    assert a.allocation != c.allocation
    assert 0 < a.offloading_rate < 1


def test_random_rejects_bad_probability():
    with pytest.raises(ValueError):
        baseline(*scenario(3), "random", p=1.5)
    with pytest.raises(ValueError):
        baseline(*scenario(3), "everything-local")


def test_infeasible_devices_listed():
    devs = [make_device(1), make_device(2, accuracy_req=0.99), make_device(3, accuracy_req=0.97)]
    with pytest.raises(InfeasibleAccuracyError) as exc:
        greedy_offload(devs, CFG, MODELS, rates_for(devs))
    assert exc.value.device_ids == [2, 3]


def test_per_device_frame_limit_respected():
    # a device with a tight frame limit cannot use the model-wide M*
    models = Models(MODELS.complexity, SaturatingAccuracy())
    devs = [make_device(1, m_max=5)]
    with pytest.raises(InfeasibleAccuracyError):
        greedy_offload(devs, CFG, models, rates_for(devs))
