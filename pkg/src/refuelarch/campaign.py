"""Delta-v budgets for the rendezvous architectures and the leg-by-leg mass oracle."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import massmodel as mm
from .orbits import (
    TWO_PI,
    CircularOrbit,
    GravityModel,
    PerigeeBelowSurface,
    PhasingPolicy,
    _phasing_dv,
    wrap_angle,
)


class Architecture(str, enum.Enum):
    A = "A"  # servicer does everything
    B = "B"  # targets change plane, servicer phases
    C = "C"  # servicer changes plane, targets phase
    D = "D"  # targets come to a passive servicer
    E = "E"  # optimized rendezvous points

    def __str__(self) -> str:
        return self.value


FIXED_ARCHITECTURES = (Architecture.A, Architecture.B, Architecture.C, Architecture.D)


class LegInfeasible(PerigeeBelowSurface):
    def __init__(self, leg: int, actor: str, cause: Exception):
        super().__init__(f"leg {leg} ({actor}): {cause}")
        self.leg = leg
        self.actor = actor


@dataclass(frozen=True)
class Constellation:
    servicer: CircularOrbit
    targets: tuple[CircularOrbit, ...]
    gravity: GravityModel = field(default_factory=GravityModel)
    phasing: PhasingPolicy = field(default_factory=PhasingPolicy)

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.targets:
            raise ValueError("constellation needs at least one target")
        alt = self.servicer.altitude
        if any(t.altitude != alt for t in self.targets):
            raise ValueError("all spacecraft must share the servicer's altitude")

    @property
    def n(self) -> int:
        return len(self.targets)

    def truncated(self, n: int) -> Constellation:
        """The same constellation serving only targets 1..n."""
        if not 1 <= n <= self.n:
            raise ValueError(f"n must lie in [1, {self.n}], got {n}")
        return replace(self, targets=self.targets[:n])

    def with_inclinations(self, inclinations: Sequence[float]) -> Constellation:
        if len(inclinations) != self.n:
            raise ValueError("one inclination per target required")
        targets = tuple(replace(t, inclination=i) for t, i in zip(self.targets, inclinations))
        return replace(self, targets=targets)


@dataclass(frozen=True)
class RendezvousPlan:
    inclinations: tuple[float, ...]
    arg_latitudes: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "inclinations", tuple(float(i) for i in self.inclinations))
        object.__setattr__(self, "arg_latitudes", tuple(float(u) for u in self.arg_latitudes))
        if len(self.inclinations) != len(self.arg_latitudes):
            raise ValueError("plan needs one inclination and one arg_latitude per target")
        if any(not 0.0 <= i <= math.pi for i in self.inclinations):
            raise ValueError("rendezvous inclinations must lie in [0, pi]")
        if any(not 0.0 <= u < TWO_PI for u in self.arg_latitudes):
            raise ValueError("rendezvous arg_latitudes must lie in [0, 2*pi)")

    def __len__(self) -> int:
        return len(self.inclinations)


def plan_for_architecture(
    c: Constellation, arch: Architecture | str | RendezvousPlan
) -> RendezvousPlan:
    """Rendezvous points implied by an architecture; a plan stands for itself (E)."""
    if isinstance(arch, RendezvousPlan):
        return arch
    arch = Architecture(arch)
    if arch is Architecture.E:
        raise ValueError("architecture E needs an explicit RendezvousPlan")
    s = c.servicer
    n = c.n
    own_i = tuple(t.inclination for t in c.targets)
    own_u = tuple(t.arg_latitude for t in c.targets)
    if arch is Architecture.A:
        return RendezvousPlan(own_i, own_u)
    if arch is Architecture.B:
        return RendezvousPlan((s.inclination,) * n, own_u)
    if arch is Architecture.C:
        return RendezvousPlan(own_i, (s.arg_latitude,) * n)
    return RendezvousPlan((s.inclination,) * n, (s.arg_latitude,) * n)


def _transfer(
    v: float, r: float, i0: float, u0: float, i1: float, u1: float,
    policy: PhasingPolicy, g: GravityModel,
) -> float:
    # the maneuvering craft always chases its destination slot
    dv = 2.0 * v * math.sin(0.5 * abs(i1 - i0))
    return dv + _phasing_dv(r, wrap_angle(u1 - u0), policy, g)


def leg_delta_vs(
    c: Constellation,
    inclinations: Sequence[float],
    arg_latitudes: Sequence[float],
) -> tuple[list[float], list[float], list[float]]:
    """Servicer (n + 1 entries, return last), target inbound and outbound delta-v."""
    if len(inclinations) != c.n or len(arg_latitudes) != c.n:
        raise ValueError(f"plan has {len(inclinations)} entries for {c.n} targets")
    g = c.gravity
    policy = c.phasing
    r = c.servicer.radius(g)
    v = math.sqrt(g.mu / r)

    def transfer(i0: float, u0: float, i1: float, u1: float) -> float:
        return _transfer(v, r, i0, u0, i1, u1, policy, g)
    i_home, u_home = c.servicer.inclination, c.servicer.arg_latitude
    i_cur, u_cur = i_home, u_home
    dv_s, dv_in, dv_out = [], [], []
    for j, (target, i_ref, u_ref) in enumerate(zip(c.targets, inclinations, arg_latitudes), start=1):
        i_t, u_t = target.inclination, target.arg_latitude
        actor = "servicer"
        try:
            dv_s.append(transfer(i_cur, u_cur, i_ref, u_ref))
            actor = "target inbound"
            dv_in.append(transfer(i_t, u_t, i_ref, u_ref))
            actor = "target outbound"
            dv_out.append(transfer(i_ref, u_ref, i_t, u_t))
        except PerigeeBelowSurface as exc:
            raise LegInfeasible(j, actor, exc) from exc
        i_cur, u_cur = i_ref, u_ref
    try:
        dv_s.append(transfer(i_cur, u_cur, i_home, u_home))
    except PerigeeBelowSurface as exc:
        raise LegInfeasible(c.n + 1, "servicer return", exc) from exc
    return dv_s, dv_in, dv_out


def build_budget(c: Constellation, plan: RendezvousPlan) -> mm.CampaignBudget:
    """Thread the servicer through every rendezvous and back home.

    The servicer waits at each rendezvous point until its next leg. Each target
    flies to its rendezvous point and then back to the slot it would occupy had
    it never moved, so its return gap mirrors the inbound one.

    Raises:
        LegInfeasible: A phasing orbit would hit the Earth; carries the 1-based leg.
    """
    if len(plan) != c.n:
        raise ValueError(f"plan has {len(plan)} entries for {c.n} targets")
    dv_s, dv_in, dv_out = leg_delta_vs(c, plan.inclinations, plan.arg_latitudes)
    legs = tuple(mm.LegBudget(*dvs) for dvs in zip(dv_s, dv_in, dv_out))
    return mm.CampaignBudget(legs, dv_s[-1])


def simulate_masses(budget: mm.CampaignBudget, params: mm.MissionParams) -> mm.CampaignResult:
    """Walk the campaign backwards one burn and one hand-over at a time.

    Independent of the closed forms in :mod:`refuelarch.massmodel`; tests use it
    as their oracle.
    """
    if budget.n != params.n:
        raise ValueError(f"budget has {budget.n} legs but params.n = {params.n}")
    c_s = params.isp_servicer
    c_t = params.isp_target
    g0 = params.g0
    refuels = []
    for j, leg in enumerate(budget.legs):
        m_t_start = params.target_initial_mass
        m_t_end = m_t_start + params.refuel_for(j)
        # target mass just before its outbound burn, and just after its inbound one
        before_out = mm.rocket_mass_before(m_t_end, leg.dv_target_out, c_t, g0)
        after_in = m_t_start / mm.rocket_mass_before(1.0, leg.dv_target_in, c_t, g0)
        refuels.append(before_out - after_in)

    mass = mm.rocket_mass_before(params.servicer_final_mass, budget.dv_servicer_return, c_s, g0)
    for j in reversed(range(budget.n)):
        mass = mm.rocket_mass_before(mass + refuels[j], budget.legs[j].dv_servicer, c_s, g0)
    return mm._result(mass, params, refuels)


def initial_mass(budget: mm.CampaignBudget, params: mm.MissionParams) -> mm.CampaignResult:
    """Closed-form wet mass, picking the non-cooperative form for passive targets."""
    if budget.has_target_maneuvers:
        return mm.servicer_initial_mass_cooperative(budget, params)
    return mm.servicer_initial_mass_noncooperative(budget, params)


def evaluate_architecture(
    c: Constellation,
    arch: Architecture | str | RendezvousPlan,
    params: mm.MissionParams,
) -> mm.CampaignResult:
    if params.n != c.n:
        raise ValueError(f"params.n = {params.n} but the constellation has {c.n} targets")
    budget = build_budget(c, plan_for_architecture(c, arch))
    return initial_mass(budget, params)
