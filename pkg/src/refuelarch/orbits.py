"""Impulsive maneuver costs between circular orbits of a single altitude shell.

Two maneuver kinds are modeled: a pure inclination change at a shared node and
a coplanar phasing maneuver that waits on a temporary orbit of different
period. Angles are radians, distances km, speeds km/s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

MU_EARTH = 398600.4418  # km^3/s^2
EARTH_RADIUS = 6378.137  # km


class PerigeeBelowSurface(ValueError):
    """Raised when a phasing orbit would dip below the Earth's surface."""


class InvalidPolicy(ValueError):
    """Raised for a phasing policy with an unusable revolution count."""


@dataclass(frozen=True)
class GravityModel:
    mu: float = MU_EARTH
    earth_radius: float = EARTH_RADIUS

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.earth_radius > 0:
            raise ValueError(f"earth_radius must be positive, got {self.earth_radius}")


@dataclass(frozen=True)
class CircularOrbit:
    """Position of a spacecraft on a circular orbit.

    ``arg_latitude`` is relative to a reference shared by every spacecraft of
    the campaign (the servicer's initial slot, by convention).
    """

    altitude: float
    inclination: float
    arg_latitude: float = 0.0

    def __post_init__(self) -> None:
        if not self.altitude > 0:
            raise ValueError(f"altitude must be positive, got {self.altitude}")
        if not 0.0 <= self.inclination <= math.pi:
            raise ValueError(f"inclination must lie in [0, pi], got {self.inclination}")
        if not 0.0 <= self.arg_latitude < TWO_PI:
            raise ValueError(
                f"arg_latitude must lie in [0, 2*pi), got {self.arg_latitude}"
            )

    def radius(self, g: GravityModel) -> float:
        return g.earth_radius + self.altitude


@dataclass(frozen=True)
class PhasingPolicy:
    """Revolution counts of the chasing (k1) and chased (k2) spacecraft."""

    k1: int = 1
    k2: int = 1

    def __post_init__(self) -> None:
        if int(self.k1) != self.k1 or self.k1 < 1:
            raise InvalidPolicy(f"k1 must be an integer >= 1, got {self.k1}")
        if int(self.k2) != self.k2 or self.k2 < 0:
            raise InvalidPolicy(f"k2 must be an integer >= 0, got {self.k2}")


def wrap_angle(angle: float) -> float:
    """Map an angle onto [0, 2*pi)."""
    wrapped = math.fmod(angle, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def circular_velocity(orbit: CircularOrbit, g: GravityModel) -> float:
    return math.sqrt(g.mu / orbit.radius(g))


def delta_v_inclination(v: float, delta_i: float) -> float:
    """Cost of rotating a circular orbit's plane by ``delta_i`` at the node.

    Args:
        v: Circular speed [km/s].
        delta_i: Magnitude of the plane change [rad], within [0, pi].

    Raises:
        ValueError: If ``delta_i`` is outside [0, pi].
    """
    if not 0.0 <= delta_i <= math.pi:
        raise ValueError(f"delta_i must lie in [0, pi], got {delta_i}")
    return 2.0 * v * math.sin(0.5 * delta_i)


def phasing_semi_major_axis(
    r: float, delta_u: float, policy: PhasingPolicy
) -> float:
    phase_angle = TWO_PI - delta_u
    ratio = (phase_angle + TWO_PI * policy.k2) / (TWO_PI * policy.k1)
    return ratio ** (2.0 / 3.0) * r


def _phasing_dv(r: float, delta_u: float, policy: PhasingPolicy, g: GravityModel) -> float:
    if delta_u == 0.0:
        return 0.0
    a = phasing_semi_major_axis(r, delta_u, policy)
    # the burn point is one apsis of the phasing ellipse, the other sits at 2a - r
    if min(r, 2.0 * a - r) <= g.earth_radius:
        raise PerigeeBelowSurface(
            f"phasing orbit with a={a:.3f} km has perigee "
            f"{min(r, 2.0 * a - r) - g.earth_radius:.3f} km above the surface"
        )
    v_circ = math.sqrt(g.mu / r)
    v_burn = math.sqrt(g.mu * (2.0 / r - 1.0 / a))
    return 2.0 * abs(v_circ - v_burn)


def delta_v_phasing(
    orbit: CircularOrbit,
    delta_u: float,
    policy: PhasingPolicy,
    g: GravityModel,
) -> float:
    """Two-burn coplanar phasing cost.

    ``delta_u`` is the along-track lead of the chased spacecraft as seen from
    the chaser, in [0, 2*pi). A zero gap costs nothing: co-located craft need
    no maneuver even though the phasing-orbit formula would not return r.

    Raises:
        ValueError: ``delta_u`` outside [0, 2*pi).
        PerigeeBelowSurface: The phasing orbit intersects the Earth.
    """
    if not 0.0 <= delta_u < TWO_PI:
        raise ValueError(f"delta_u must lie in [0, 2*pi), got {delta_u}")
    return _phasing_dv(orbit.radius(g), delta_u, policy, g)


def transfer_delta_v(
    start: CircularOrbit,
    to_inclination: float,
    to_arg_latitude: float,
    chaser_is_self: bool,
    policy: PhasingPolicy,
    g: GravityModel,
) -> float:
    """Plane change followed by phasing, from ``start`` to a slot on the same shell.

    With ``chaser_is_self`` the maneuvering craft chases the destination slot, so
    the gap is the destination's lead over the start. Otherwise the gap is
    measured from the destination towards the start.
    """
    if chaser_is_self:
        delta_u = wrap_angle(to_arg_latitude - start.arg_latitude)
    else:
        delta_u = wrap_angle(start.arg_latitude - to_arg_latitude)
    v = circular_velocity(start, g)
    dv_inc = delta_v_inclination(v, abs(to_inclination - start.inclination))
    return dv_inc + delta_v_phasing(start, delta_u, policy, g)
