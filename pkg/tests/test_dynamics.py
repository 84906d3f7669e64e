import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dccmkp.dynamics import (
    capacities_at,
    damrs_step,
    event_to_dict,
    initial_damrs,
    make_schedule,
)
from dccmkp.instance import generate

BASE = (100.0, 200.0, 300.0)


def test_schedule_boundary_layout():
    sched = make_schedule(BASE, eta=0.2, num_changes=4, budget=10_000,
                          warmup=2_000, seed=1)
    assert sched.tau_evaluations == 2_000
    assert sched.boundaries == (2_000, 4_000, 6_000, 8_000)
    assert len(sched.change_log) == 4


def test_schedule_no_drift_and_nonempty_subsets():
    for seed in range(30):
        sched = make_schedule(BASE, eta=0.2, num_changes=10, budget=50_000,
                              warmup=5_000, seed=seed)
        for ev in sched.change_log:
            assert ev.selected
            for i, b in enumerate(ev.new_capacities):
                assert 0.8 * BASE[i] - 1e-9 <= b <= 1.2 * BASE[i] + 1e-9
                if (i + 1) not in ev.selected:
                    assert b == BASE[i]
            for knap, r in ev.multipliers.items():
                assert knap in ev.selected
                assert 0.8 <= r <= 1.2
                assert ev.new_capacities[knap - 1] == pytest.approx(BASE[knap - 1] * r)


def test_rescale_is_relative_to_base_not_cumulative():
    sched = make_schedule(BASE, eta=0.2, num_changes=50, budget=200_000,
                          warmup=10_000, seed=3)
    # If changes compounded, 50 draws would leave the band with high
    # probability; relative-to-base rescaling cannot.
    for ev in sched.change_log:
        for i, b in enumerate(ev.new_capacities):
            assert 0.8 * BASE[i] - 1e-9 <= b <= 1.2 * BASE[i] + 1e-9


def test_capacities_at_piecewise():
    sched = make_schedule(BASE, eta=0.2, num_changes=2, budget=9_000,
                          warmup=3_000, seed=7)
    assert capacities_at(sched, 0) == BASE
    assert capacities_at(sched, 2_999) == BASE
    first = sched.change_log[0].new_capacities
    second = sched.change_log[1].new_capacities
    assert capacities_at(sched, 3_000) == first
    assert capacities_at(sched, 5_999) == first
    assert capacities_at(sched, 6_000) == second
    assert capacities_at(sched, 10**9) == second


def test_schedule_deterministic_in_seed():
    a = make_schedule(BASE, 0.2, 5, 10_000, 1_000, seed=9)
    b = make_schedule(BASE, 0.2, 5, 10_000, 1_000, seed=9)
    assert a == b
    c = make_schedule(BASE, 0.2, 5, 10_000, 1_000, seed=10)
    assert a != c


def test_schedule_validation():
    with pytest.raises(ValueError):
        make_schedule(BASE, eta=0.0, num_changes=5, budget=10_000, warmup=0, seed=1)
    with pytest.raises(ValueError):
        make_schedule(BASE, eta=1.0, num_changes=5, budget=10_000, warmup=0, seed=1)
    with pytest.raises(ValueError):
        make_schedule(BASE, eta=0.2, num_changes=0, budget=10_000, warmup=0, seed=1)
    with pytest.raises(ValueError):
        make_schedule(BASE, eta=0.2, num_changes=5, budget=1_000, warmup=1_000, seed=1)
    with pytest.raises(ValueError):
        # tau would be zero
        make_schedule(BASE, eta=0.2, num_changes=5_000, budget=2_000,
                      warmup=1_000, seed=1)


@given(st.integers(min_value=0, max_value=10_000),
       st.sampled_from([20, 50, 100]))
@settings(max_examples=30, deadline=None)
def test_exactly_nu_boundaries_inside_budget(seed, nu):
    budget, warmup = 100_000, 10_000
    sched = make_schedule(BASE, 0.2, nu, budget, warmup, seed)
    assert len(sched.boundaries) == nu
    assert sched.boundaries[0] == warmup
    assert all(b < budget for b in sched.boundaries)
    spacing = {b2 - b1 for b1, b2 in zip(sched.boundaries, sched.boundaries[1:])}
    assert spacing <= {sched.tau_evaluations}


def test_event_to_dict_roundtrippable_shape():
    sched = make_schedule(BASE, 0.2, 2, 10_000, 1_000, seed=2)
    d = event_to_dict(sched.change_log[0])
    assert set(d) == {"at_evaluation", "selected", "multipliers", "new_capacities"}
    assert d["at_evaluation"] == 1_000
    assert sorted(d["selected"]) == sorted(int(k) for k in d["multipliers"])


def test_generated_instance_capacities_feed_schedules():
    inst = generate("CUSTOM", 30, 3, "STRONG", "V1", seed=5)
    sched = make_schedule(inst.capacities, 0.2, 3, 30_000, 3_000, seed=5)
    assert sched.base_capacities == inst.capacities


# --- adaptive mutation controller -------------------------------------------

def test_damrs_initial_state():
    st0 = initial_damrs(0.01, population_size=100)
    assert st0.p_m_initial == 0.01
    assert st0.p_m_current == 0.01
    assert st0.threshold == 30
    assert not st0.is_adapt


def test_damrs_change_with_no_feasible_doubles():
    st0 = initial_damrs(0.01, 100)
    st1 = damrs_step(st0, changed=True, feasible_count=0)
    assert st1.p_m_current == pytest.approx(0.02)
    assert st1.is_adapt


def test_damrs_change_with_feasible_resets():
    st0 = initial_damrs(0.01, 100)
    st1 = damrs_step(st0, changed=True, feasible_count=0)
    st2 = damrs_step(st1, changed=True, feasible_count=5)
    assert st2.p_m_current == 0.01
    assert not st2.is_adapt


def test_damrs_threshold_crossing_resets():
    st0 = initial_damrs(0.01, 100)
    st1 = damrs_step(st0, changed=True, feasible_count=0)
    st2 = damrs_step(st1, changed=False, feasible_count=29)
    assert st2.is_adapt and st2.p_m_current == pytest.approx(0.02)
    st3 = damrs_step(st2, changed=False, feasible_count=30)
    assert not st3.is_adapt and st3.p_m_current == 0.01


def test_damrs_idle_without_change():
    st0 = initial_damrs(0.01, 100)
    st1 = damrs_step(st0, changed=False, feasible_count=0)
    assert st1 == st0


def test_damrs_no_compounding():
    st0 = initial_damrs(0.01, 100)
    s = damrs_step(st0, changed=True, feasible_count=0)
    s = damrs_step(s, changed=False, feasible_count=0)
    s = damrs_step(s, changed=False, feasible_count=0)
    assert s.p_m_current == pytest.approx(0.02)  # still a single doubling


@given(st.lists(st.tuples(st.booleans(), st.integers(min_value=0, max_value=120)),
                max_size=60))
@settings(max_examples=60, deadline=None)
def test_damrs_rate_always_in_two_level_set(steps):
    s = initial_damrs(0.01, 100)
    for changed, feas in steps:
        s = damrs_step(s, changed=changed, feasible_count=feas)
        assert s.p_m_current in (pytest.approx(0.01), pytest.approx(0.02))
        if s.p_m_current == pytest.approx(0.02):
            assert s.is_adapt
