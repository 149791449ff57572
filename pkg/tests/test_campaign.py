import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from refuelarch import massmodel as mm
from refuelarch.campaign import (
    FIXED_ARCHITECTURES,
    Architecture,
    Constellation,
    LegInfeasible,
    RendezvousPlan,
    build_budget,
    evaluate_architecture,
    leg_delta_vs,
    plan_for_architecture,
    simulate_masses,
)
from refuelarch.orbits import PhasingPolicy

from conftest import constellation, orbit, params

DV_PHASE_PI = 1.7011958787864696
MIXED = constellation([(70.0, 300.0), (53.2, 200.0), (97.6, 45.0), (53.0, 120.0)])

target_specs = st.lists(
    st.tuples(st.floats(40.0, 100.0), st.floats(0.0, 359.0)), min_size=1, max_size=8
)


def test_plans_follow_their_definitions():
    s = MIXED.servicer
    own_i = tuple(t.inclination for t in MIXED.targets)
    own_u = tuple(t.arg_latitude for t in MIXED.targets)
    n = MIXED.n
    assert plan_for_architecture(MIXED, "A") == RendezvousPlan(own_i, own_u)
    assert plan_for_architecture(MIXED, "B") == RendezvousPlan((s.inclination,) * n, own_u)
    assert plan_for_architecture(MIXED, "C") == RendezvousPlan(own_i, (s.arg_latitude,) * n)
    assert plan_for_architecture(MIXED, Architecture.D) == RendezvousPlan(
        (s.inclination,) * n, (s.arg_latitude,) * n
    )


def test_architecture_e_needs_plan():
    with pytest.raises(ValueError):
        plan_for_architecture(MIXED, Architecture.E)
    plan = plan_for_architecture(MIXED, "C")
    assert plan_for_architecture(MIXED, plan) is plan


def test_degenerate_geometry_gives_one_plan():
    c = constellation([(53.0, 0.0)] * 3)
    plans = {plan_for_architecture(c, a) for a in FIXED_ARCHITECTURES}
    assert len(plans) == 1


def test_architecture_a_has_no_target_burns():
    b = build_budget(MIXED, plan_for_architecture(MIXED, "A"))
    assert not b.has_target_maneuvers
    assert b.total_servicer_dv > 0


def test_architecture_d_has_passive_servicer():
    b = build_budget(MIXED, plan_for_architecture(MIXED, "D"))
    assert b.servicer_dvs == [0.0] * (MIXED.n + 1)


def test_single_target_half_orbit_ahead():
    c = constellation([(53.0, 180.0)])
    b = build_budget(c, plan_for_architecture(c, "A"))
    assert b.legs[0].dv_servicer == pytest.approx(DV_PHASE_PI, abs=1e-12)
    assert b.dv_servicer_return == pytest.approx(DV_PHASE_PI, abs=1e-12)


def test_target_outbound_mirrors_inbound_plane_change():
    c = constellation([(70.0, 0.0)])
    b = build_budget(c, plan_for_architecture(c, "D"))
    assert b.legs[0].dv_target_in == b.legs[0].dv_target_out > 0


def test_target_outbound_gap_is_complement():
    c = constellation([(53.0, 90.0)])
    b = build_budget(c, plan_for_architecture(c, "D"))
    # the target chases a point 270 deg ahead, then its slot 90 deg ahead
    from refuelarch.orbits import GravityModel, delta_v_phasing

    g = GravityModel()
    o = orbit(53.0, 0.0)
    p = PhasingPolicy()
    assert b.legs[0].dv_target_in == pytest.approx(delta_v_phasing(o, math.radians(270), p, g))
    assert b.legs[0].dv_target_out == pytest.approx(delta_v_phasing(o, math.radians(90), p, g))


def test_infeasible_leg_carries_index():
    c = Constellation(orbit(53.0), (orbit(53.0, 0.0), orbit(53.0, 180.0)), phasing=PhasingPolicy(3, 0))
    with pytest.raises(LegInfeasible) as info:
        build_budget(c, plan_for_architecture(c, "A"))
    assert info.value.leg == 2
    assert info.value.actor == "servicer"


def test_constellation_invariants():
    with pytest.raises(ValueError):
        Constellation(orbit(53.0), ())
    from refuelarch.orbits import CircularOrbit

    with pytest.raises(ValueError):
        Constellation(orbit(53.0), (CircularOrbit(600.0, 0.9),))


def test_plan_length_checked():
    with pytest.raises(ValueError):
        build_budget(MIXED, RendezvousPlan((0.9,), (0.0,)))


def test_simulation_of_zero_budget():
    b = mm.CampaignBudget(tuple(mm.LegBudget(0.0) for _ in range(4)))
    assert simulate_masses(b, params(4)).servicer_initial_mass == pytest.approx(1800.0)


def test_symmetric_single_target_masses_differ_at_unit_ratio():
    # the equality holds only where the critical ratio equals one; see the crossover tests
    c = constellation([(53.0, 180.0)])
    p = params(1, ratio=1.0)
    a = evaluate_architecture(c, "A", p).servicer_initial_mass
    d = evaluate_architecture(c, "D", p).servicer_initial_mass
    expected_gap = a / d - 1.0
    assert expected_gap > 0.1


def test_b_and_c_differ_off_plane():
    p = params(MIXED.n)
    assert evaluate_architecture(MIXED, "B", p) != evaluate_architecture(MIXED, "C", p)


def test_b_and_c_agree_for_coplanar_colocated():
    c = constellation([(53.0, 0.0)] * 2)
    p = params(2)
    assert evaluate_architecture(c, "B", p) == evaluate_architecture(c, "C", p)


def test_params_must_match_targets():
    with pytest.raises(ValueError):
        evaluate_architecture(MIXED, "A", params(2))


@settings(max_examples=50, deadline=None)
@given(target_specs, st.sampled_from("ABCD"), st.floats(0.2, 8.0))
def test_closed_form_equals_simulation(specs, arch, ratio):
    c = constellation(specs)
    b = build_budget(c, plan_for_architecture(c, arch))
    p = params(c.n, ratio)
    closed = evaluate_architecture(c, arch, p).servicer_initial_mass
    assert abs(closed - simulate_masses(b, p).servicer_initial_mass) / closed < 1e-12


@settings(max_examples=50, deadline=None)
@given(target_specs, st.randoms(use_true_random=False))
def test_tour_closes(specs, rnd):
    # an arbitrary plan: the servicer's final leg always brings it home
    c = constellation(specs)
    incs = [math.radians(rnd.uniform(50, 60)) for _ in specs]
    lats = [math.radians(rnd.uniform(0, 359)) for _ in specs]
    dv_s, _, _ = leg_delta_vs(c, incs, lats)
    assert len(dv_s) == c.n + 1
    solo = constellation([(math.degrees(incs[-1]), math.degrees(lats[-1]))])
    back = build_budget(solo, plan_for_architecture(solo, "A")).dv_servicer_return
    assert dv_s[-1] == pytest.approx(back, rel=1e-12, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(target_specs)
def test_budget_sums_by_architecture(specs):
    c = constellation(specs)
    a = build_budget(c, plan_for_architecture(c, "A"))
    d = build_budget(c, plan_for_architecture(c, "D"))
    assert sum(l.dv_target_in + l.dv_target_out for l in a.legs) == 0.0
    assert d.total_servicer_dv == 0.0


@settings(max_examples=50, deadline=None)
@given(target_specs)
def test_build_budget_deterministic(specs):
    c = constellation(specs)
    plan = plan_for_architecture(c, "B")
    assert build_budget(c, plan) == build_budget(c, plan)


def test_dropping_last_target_never_costs_more_under_a():
    # the last target can be skipped by going straight home: the triangle
    # inequality holds for plane changes and, for one-revolution phasing,
    # is checked numerically on random tours
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(2, 8)
        c = constellation(
            [(rng.choice([53.0, 53.2, 70.0, 97.6]), rng.uniform(0, 359)) for _ in range(n)]
        )
        full = evaluate_architecture(c, "A", params(n)).servicer_initial_mass
        part = evaluate_architecture(c.truncated(n - 1), "A", params(n - 1)).servicer_initial_mass
        assert part <= full
