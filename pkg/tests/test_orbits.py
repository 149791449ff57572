import math

import pytest
from hypothesis import given, strategies as st

from refuelarch.orbits import (
    TWO_PI,
    CircularOrbit,
    GravityModel,
    InvalidPolicy,
    PerigeeBelowSurface,
    PhasingPolicy,
    circular_velocity,
    delta_v_inclination,
    delta_v_phasing,
    phasing_semi_major_axis,
    transfer_delta_v,
    wrap_angle,
)

G = GravityModel()
LEO = CircularOrbit(550.0, math.radians(53.0))
ONE_REV = PhasingPolicy(1, 1)

# frozen from an independent scalar evaluation with mu=398600.4418, R=6378.137
V_550 = 7.585088535158763
DV_INC_0_2 = 0.026476940356525282
DV_INC_17 = 2.2422949394955554
DV_PHASE_PI = 1.7011958787864696

angles = st.floats(0.0, math.pi)
gaps = st.floats(0.0, TWO_PI, exclude_max=True)


def test_circular_velocity_at_550_km():
    assert circular_velocity(LEO, G) == pytest.approx(V_550, abs=1e-12)


def test_circular_velocity_unit_radius():
    g = GravityModel(mu=7000.0, earth_radius=6000.0)
    assert circular_velocity(CircularOrbit(1000.0, 0.0), g) == pytest.approx(1.0)


def test_circular_velocity_scales_with_root_mu():
    g4 = GravityModel(mu=4 * G.mu)
    assert circular_velocity(LEO, g4) == pytest.approx(2 * circular_velocity(LEO, G))


@pytest.mark.parametrize(
    "deg, expected", [(0.2, DV_INC_0_2), (17.0, DV_INC_17), (0.0, 0.0)]
)
def test_delta_v_inclination_values(deg, expected):
    assert delta_v_inclination(V_550, math.radians(deg)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("bad", [-1e-9, math.pi + 1e-9])
def test_delta_v_inclination_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        delta_v_inclination(V_550, bad)


def test_phasing_half_revolution():
    r = LEO.radius(G)
    assert phasing_semi_major_axis(r, math.pi, ONE_REV) / r == pytest.approx(1.3103707, abs=1e-7)
    assert delta_v_phasing(LEO, math.pi, ONE_REV, G) == pytest.approx(DV_PHASE_PI, abs=1e-12)


def test_phasing_zero_gap_is_free():
    for policy in (ONE_REV, PhasingPolicy(3, 0), PhasingPolicy(1, 5)):
        assert delta_v_phasing(LEO, 0.0, policy, G) == 0.0


@pytest.mark.parametrize("k", [1, 2, 4])
def test_phasing_vanishes_as_gap_closes_with_equal_revolutions(k):
    # a -> r needs (2pi k2) / (2pi k1) -> 1, i.e. k1 == k2
    dv = delta_v_phasing(LEO, TWO_PI - 1e-6, PhasingPolicy(k, k), G)
    assert 0.0 < dv < 1e-5


@pytest.mark.parametrize("k2", [0, 1, 3])
def test_phasing_vanishes_for_tiny_gap_with_one_extra_chaser_revolution(k2):
    # the k1 = k2 + 1 limit sits at the other end of the gap range
    dv = delta_v_phasing(LEO, 1e-6, PhasingPolicy(k2 + 1, k2), G)
    assert 0.0 < dv < 1e-5


def test_phasing_below_surface_raises():
    with pytest.raises(PerigeeBelowSurface):
        delta_v_phasing(LEO, math.pi, PhasingPolicy(3, 0), G)


def test_phasing_rejects_gap_outside_domain():
    with pytest.raises(ValueError):
        delta_v_phasing(LEO, TWO_PI, ONE_REV, G)


@pytest.mark.parametrize("k1, k2", [(0, 1), (1, -1), (1.5, 1)])
def test_invalid_policy(k1, k2):
    with pytest.raises(InvalidPolicy):
        PhasingPolicy(k1, k2)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(altitude=0.0, inclination=0.1),
        dict(altitude=550.0, inclination=-0.1),
        dict(altitude=550.0, inclination=0.1, arg_latitude=TWO_PI),
    ],
)
def test_orbit_invariants(kwargs):
    with pytest.raises(ValueError):
        CircularOrbit(**kwargs)


def test_transfer_identity_is_free():
    assert transfer_delta_v(LEO, LEO.inclination, LEO.arg_latitude, True, ONE_REV, G) == 0.0


def test_transfer_pure_plane_change():
    dv = transfer_delta_v(LEO, LEO.inclination + math.radians(0.2), 0.0, True, ONE_REV, G)
    assert dv == pytest.approx(DV_INC_0_2, abs=1e-12)


def test_transfer_pure_phasing():
    dv = transfer_delta_v(LEO, LEO.inclination, math.pi, True, ONE_REV, G)
    assert dv == pytest.approx(DV_PHASE_PI, abs=1e-12)


def test_transfer_chaser_convention():
    start = CircularOrbit(550.0, 0.9, 0.0)
    as_chaser = transfer_delta_v(start, 0.9, 1.0, True, ONE_REV, G)
    as_chased = transfer_delta_v(start, 0.9, 1.0, False, ONE_REV, G)
    assert as_chaser == pytest.approx(delta_v_phasing(start, 1.0, ONE_REV, G))
    assert as_chased == pytest.approx(delta_v_phasing(start, TWO_PI - 1.0, ONE_REV, G))


@given(angles, angles)
def test_inclination_strictly_increasing(a, b):
    if a < b:
        assert delta_v_inclination(V_550, a) < delta_v_inclination(V_550, b)


@given(st.floats(0.0, math.pi), st.floats(0.0, math.pi))
def test_inclination_sign_symmetric(i1, i2):
    assert delta_v_inclination(V_550, abs(i2 - i1)) == delta_v_inclination(V_550, abs(i1 - i2))


@given(gaps, st.integers(1, 4), st.integers(0, 4))
def test_phasing_non_negative_and_zero_only_at_zero(du, k1, k2):
    policy = PhasingPolicy(k1, k2)
    try:
        dv = delta_v_phasing(LEO, du, policy, G)
    except PerigeeBelowSurface:
        a = phasing_semi_major_axis(LEO.radius(G), du, policy)
        assert 2 * a - LEO.radius(G) <= G.earth_radius
        return
    assert dv >= 0.0
    if du == 0.0:
        assert dv == 0.0
    elif 1e-3 < du < TWO_PI - 1e-3:
        # away from the two degenerate ends the catch-up orbit differs from r
        assert dv > 0.0


@given(gaps, st.integers(1, 4), st.integers(0, 4))
def test_no_silent_subsurface_orbit(du, k1, k2):
    policy = PhasingPolicy(k1, k2)
    r = LEO.radius(G)
    a = phasing_semi_major_axis(r, du, policy)
    below = du != 0.0 and min(r, 2 * a - r) <= G.earth_radius
    if below:
        with pytest.raises(PerigeeBelowSurface):
            delta_v_phasing(LEO, du, policy, G)
    else:
        delta_v_phasing(LEO, du, policy, G)


@given(angles, gaps, gaps)
def test_transfer_is_sum_of_phases(i_to, u_from, u_to):
    start = CircularOrbit(550.0, LEO.inclination, u_from)
    total = transfer_delta_v(start, i_to, u_to, True, ONE_REV, G)
    v = circular_velocity(start, G)
    parts = delta_v_inclination(v, abs(i_to - start.inclination)) + delta_v_phasing(
        start, wrap_angle(u_to - u_from), ONE_REV, G
    )
    assert total == parts


@given(st.floats(-100.0, 100.0))
def test_wrap_angle_range(x):
    w = wrap_angle(x)
    assert 0.0 <= w < TWO_PI
    assert math.isclose(math.cos(w), math.cos(x), abs_tol=1e-9)
