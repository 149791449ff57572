"""Rocket-equation mass chains for multi-target refueling campaigns.

Delta-v values are carried in km/s and converted to m/s only where they meet
``isp * g0`` inside an exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

G0 = 9.80665  # m/s^2

NO_CROSSOVER_EPS = 1e-15


class NegativeRefuel(ValueError):
    pass


class CooperativeLegInNonCooperativeBudget(ValueError):
    pass


class NoCrossover(ArithmeticError):
    """The two architectures share a servicer delta-v total, so no ratio separates them."""


@dataclass(frozen=True)
class MissionParams:
    """Masses [kg], specific impulses [s] and standard gravity [m/s^2].

    ``required_refuel`` is either one value shared by every target or one value
    per target in delivery order.
    """

    n: int
    servicer_final_mass: float
    target_initial_mass: float
    required_refuel: float | tuple[float, ...]
    isp_servicer: float = 300.0
    isp_target: float = 300.0
    g0: float = G0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n}")
        if not self.servicer_final_mass > 0:
            raise ValueError("servicer_final_mass must be positive")
        if not self.target_initial_mass > 0:
            raise ValueError("target_initial_mass must be positive")
        if not (self.isp_servicer > 0 and self.isp_target > 0):
            raise ValueError("specific impulses must be positive")
        if not self.g0 > 0:
            raise ValueError("g0 must be positive")
        if isinstance(self.required_refuel, (list, tuple)):
            object.__setattr__(self, "required_refuel", tuple(float(m) for m in self.required_refuel))
            if len(self.required_refuel) != self.n:
                raise ValueError(
                    f"required_refuel has {len(self.required_refuel)} entries for n={self.n}"
                )
            if any(m < 0 for m in self.required_refuel):
                raise ValueError("required_refuel must be non-negative")
        elif self.required_refuel < 0:
            raise ValueError("required_refuel must be non-negative")

    @property
    def servicer_exhaust_speed(self) -> float:
        """Effective exhaust speed of the servicer [m/s]."""
        return self.isp_servicer * self.g0

    @property
    def target_exhaust_speed(self) -> float:
        return self.isp_target * self.g0

    def refuel_for(self, j: int) -> float:
        """Required usable refuel of the j-th target (0-based)."""
        if isinstance(self.required_refuel, tuple):
            return self.required_refuel[j]
        return float(self.required_refuel)

    @property
    def total_required_refuel(self) -> float:
        return math.fsum(self.refuel_for(j) for j in range(self.n))

    @property
    def uniform_refuel(self) -> float:
        if isinstance(self.required_refuel, tuple):
            if len(set(self.required_refuel)) != 1:
                raise ValueError(
                    "critical mass ratios assume the same required refuel for every target"
                )
            return self.required_refuel[0]
        return float(self.required_refuel)


@dataclass(frozen=True)
class LegBudget:
    dv_servicer: float
    dv_target_in: float = 0.0
    dv_target_out: float = 0.0

    def __post_init__(self) -> None:
        if min(self.dv_servicer, self.dv_target_in, self.dv_target_out) < 0:
            raise ValueError(f"delta-v components must be non-negative: {self}")


@dataclass(frozen=True)
class CampaignBudget:
    """Per-leg delta-v in delivery order plus the servicer's trip home."""

    legs: tuple[LegBudget, ...]
    dv_servicer_return: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "legs", tuple(self.legs))
        if not self.legs:
            raise ValueError("a campaign needs at least one leg")
        if self.dv_servicer_return < 0:
            raise ValueError("dv_servicer_return must be non-negative")

    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def servicer_dvs(self) -> list[float]:
        """All n + 1 servicer transfers, the return leg last."""
        return [leg.dv_servicer for leg in self.legs] + [self.dv_servicer_return]

    @property
    def total_servicer_dv(self) -> float:
        return math.fsum(self.servicer_dvs)

    @property
    def has_target_maneuvers(self) -> bool:
        return any(leg.dv_target_in or leg.dv_target_out for leg in self.legs)


@dataclass(frozen=True)
class CampaignResult:
    servicer_initial_mass: float
    variable_fuel_mass: float
    servicer_fuel_consumed: float
    target_fuel_consumed: float
    per_leg_refuel_mass: tuple[float, ...] = field(default_factory=tuple)


def rocket_mass_before(mass_after: float, dv: float, isp: float, g0: float = G0) -> float:
    """Mass before a burn of ``dv`` km/s that leaves ``mass_after`` kg."""
    return mass_after * math.exp(dv * 1000.0 / (isp * g0))


def _check_length(budget: CampaignBudget, params: MissionParams) -> None:
    if budget.n != params.n:
        raise ValueError(f"budget has {budget.n} legs but params.n = {params.n}")


def _refuel(m_t: float, m_req: float, dv_in: float, dv_out: float, c_t: float) -> float:
    if dv_in == 0.0 and dv_out == 0.0:
        return m_req
    return (m_t + m_req) * math.exp(dv_out * 1000.0 / c_t) - m_t * math.exp(-dv_in * 1000.0 / c_t)


def cooperative_refuel_mass(leg: LegBudget, params: MissionParams, j: int = 0) -> float:
    """Fuel handed to a target that flies to the rendezvous and back to its slot.

    The target leaves with the same usable fuel it would have had with no
    maneuvers, so the delivery must also cover its own inbound and outbound
    burns. ``j`` selects the target's required refuel (0-based).
    """
    refuel = _refuel(
        params.target_initial_mass,
        params.refuel_for(j),
        leg.dv_target_in,
        leg.dv_target_out,
        params.target_exhaust_speed,
    )
    if refuel < 0:
        raise NegativeRefuel(f"refuel mass {refuel} kg for leg {j + 1} is negative")
    return refuel


def _cumulative_growth(dvs: Sequence[float], exhaust_speed: float) -> list[float]:
    """exp(sum of the first k transfers / c) for k = 1..len(dvs)."""
    growth = []
    running = 0.0
    for dv in dvs:
        running += dv
        growth.append(math.exp(running * 1000.0 / exhaust_speed))
    return growth


def _wet_mass(servicer_dvs: Sequence[float], refuels: Sequence[float], params: MissionParams) -> float:
    growth = _cumulative_growth(servicer_dvs, params.servicer_exhaust_speed)
    return math.fsum(
        [params.servicer_final_mass * growth[-1]]
        + [m_r * growth[j] for j, m_r in enumerate(refuels)]
    )


def wet_mass_from_dvs(
    servicer_dvs: Sequence[float],
    target_in: Sequence[float],
    target_out: Sequence[float],
    params: MissionParams,
) -> float:
    """Cooperative closed form on bare delta-v lists (n + 1 servicer entries).

    Skips the dataclass layer; the optimizer calls this in its inner loop.
    """
    m_t = params.target_initial_mass
    c_t = params.target_exhaust_speed
    refuels = [
        _refuel(m_t, params.refuel_for(j), dv_in, dv_out, c_t)
        for j, (dv_in, dv_out) in enumerate(zip(target_in, target_out))
    ]
    return _wet_mass(servicer_dvs, refuels, params)


def _closed_form(
    budget: CampaignBudget, params: MissionParams, refuels: Sequence[float]
) -> CampaignResult:
    return _result(_wet_mass(budget.servicer_dvs, refuels, params), params, refuels)


def _result(initial: float, params: MissionParams, refuels: Sequence[float]) -> CampaignResult:
    m_req_total = params.total_required_refuel
    delivered = math.fsum(refuels)
    return CampaignResult(
        servicer_initial_mass=initial,
        variable_fuel_mass=initial - params.servicer_final_mass - m_req_total,
        servicer_fuel_consumed=initial - params.servicer_final_mass - delivered,
        target_fuel_consumed=delivered - m_req_total,
        per_leg_refuel_mass=tuple(refuels),
    )


def servicer_initial_mass_cooperative(
    budget: CampaignBudget, params: MissionParams
) -> CampaignResult:
    """Closed-form servicer wet mass when targets may maneuver."""
    _check_length(budget, params)
    refuels = [cooperative_refuel_mass(leg, params, j) for j, leg in enumerate(budget.legs)]
    return _closed_form(budget, params, refuels)


def servicer_initial_mass_noncooperative(
    budget: CampaignBudget, params: MissionParams
) -> CampaignResult:
    """Closed-form servicer wet mass when targets stay passive.

    Raises:
        CooperativeLegInNonCooperativeBudget: A leg carries target delta-v.
    """
    _check_length(budget, params)
    if budget.has_target_maneuvers:
        raise CooperativeLegInNonCooperativeBudget(
            "non-cooperative budgets must have zero target delta-v on every leg"
        )
    refuels = [params.refuel_for(j) for j in range(params.n)]
    return _closed_form(budget, params, refuels)


def _ratio_terms(
    budget_coop: CampaignBudget, budget_noncoop: CampaignBudget, params: MissionParams
) -> tuple[float, float, float]:
    if budget_coop.n != params.n or budget_noncoop.n != params.n:
        raise ValueError("both budgets must have params.n legs")
    if budget_noncoop.has_target_maneuvers:
        raise CooperativeLegInNonCooperativeBudget(
            "the non-cooperative budget must have zero target delta-v"
        )
    c_s = params.servicer_exhaust_speed
    c_t = params.target_exhaust_speed
    req = params.uniform_refuel / params.target_initial_mass
    growth_c = _cumulative_growth(budget_coop.servicer_dvs, c_s)
    growth_n = _cumulative_growth(budget_noncoop.servicer_dvs, c_s)
    terms = []
    for j, leg in enumerate(budget_coop.legs):
        target_factor = (1.0 + req) * math.exp(leg.dv_target_out * 1000.0 / c_t) - math.exp(
            -leg.dv_target_in * 1000.0 / c_t
        )
        terms.append(req * growth_n[j] - target_factor * growth_c[j])
    return math.fsum(terms), growth_c[-1], growth_n[-1]


def critical_mass_ratio(
    budget_coop: CampaignBudget, budget_noncoop: CampaignBudget, params: MissionParams
) -> float:
    """Servicer-dry to target-initial mass ratio where both architectures tie.

    Above the returned ratio the cooperative budget gives the lighter servicer
    whenever its servicer delta-v total is the smaller one.

    Raises:
        NoCrossover: Both budgets have the same total servicer delta-v.
    """
    numerator, total_c, total_n = _ratio_terms(budget_coop, budget_noncoop, params)
    denominator = total_c - total_n
    if abs(denominator) < NO_CROSSOVER_EPS:
        raise NoCrossover("servicer delta-v totals are identical; no critical ratio exists")
    return numerator / denominator


def critical_mass_ratio_a_d(
    budget_noncoop: CampaignBudget, budget_fully_coop: CampaignBudget, params: MissionParams
) -> float:
    """Critical ratio against a passive-depot servicer that never maneuvers."""
    if budget_fully_coop.total_servicer_dv != 0.0:
        raise ValueError("the fully cooperative budget must have zero servicer delta-v")
    if budget_fully_coop.n != params.n or budget_noncoop.n != params.n:
        raise ValueError("both budgets must have params.n legs")
    if budget_noncoop.has_target_maneuvers:
        raise CooperativeLegInNonCooperativeBudget(
            "the non-cooperative budget must have zero target delta-v"
        )
    c_s = params.servicer_exhaust_speed
    c_t = params.target_exhaust_speed
    req = params.uniform_refuel / params.target_initial_mass
    growth_n = _cumulative_growth(budget_noncoop.servicer_dvs, c_s)
    numerator = math.fsum(
        req * growth_n[j]
        - (
            (1.0 + req) * math.exp(leg.dv_target_out * 1000.0 / c_t)
            - math.exp(-leg.dv_target_in * 1000.0 / c_t)
        )
        for j, leg in enumerate(budget_fully_coop.legs)
    )
    denominator = 1.0 - growth_n[-1]
    if abs(denominator) < NO_CROSSOVER_EPS:
        raise NoCrossover("the non-cooperative servicer never maneuvers; no critical ratio exists")
    return numerator / denominator
