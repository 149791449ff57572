"""Architecture E: search the rendezvous points that minimize servicer wet mass.

A seeded multistart of coordinate pattern searches over the 2n variables
(one inclination and one argument of latitude per target). The first four
starts are always the plans of architectures A-D, so the result can never be
worse than the best fixed architecture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from . import massmodel as mm
from .campaign import (
    FIXED_ARCHITECTURES,
    Architecture,
    Constellation,
    RendezvousPlan,
    build_budget,
    initial_mass,
    _transfer,
    plan_for_architecture,
)
from .orbits import TWO_PI, PerigeeBelowSurface, wrap_angle

MATCH_TOLERANCE = 1e-6  # rad
MIN_STEP = 1e-7  # rad


class InfeasibleBounds(ValueError):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    num_starts: int = 44
    rng_seed: int = 0
    max_local_iterations: int = 500
    convergence_tolerance: float = 1e-6  # kg
    initial_step: float = math.radians(5.0)
    # None means [min, max] over the servicer and target inclinations
    bounds_inclination: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if int(self.num_starts) != self.num_starts or self.num_starts < 1:
            raise ValueError("num_starts must be a positive integer")
        if self.max_local_iterations < 1:
            raise ValueError("max_local_iterations must be positive")
        if not self.convergence_tolerance > 0:
            raise ValueError("convergence_tolerance must be positive")
        if not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        if self.bounds_inclination is not None:
            lo, hi = self.bounds_inclination
            if not 0.0 <= lo <= hi <= math.pi:
                raise ValueError(f"invalid inclination bounds {self.bounds_inclination}")


@dataclass(frozen=True)
class LocalResult:
    plan: RendezvousPlan
    objective: float
    history: tuple[float, ...]


@dataclass(frozen=True)
class OptimizationReport:
    best_plan: RendezvousPlan
    best_result: mm.CampaignResult
    matched_architecture: Architecture | None
    per_start_history: tuple[tuple[int, float], ...]
    baselines: dict[Architecture, float] = field(default_factory=dict)

    @property
    def objective(self) -> float:
        return self.best_result.servicer_initial_mass


def inclination_bounds(c: Constellation, cfg: OptimizerConfig) -> tuple[float, float]:
    """Search bounds on rendezvous inclination, checked against plan A.

    Raises:
        InfeasibleBounds: A target's own inclination falls outside the bounds.
    """
    incs = [c.servicer.inclination] + [t.inclination for t in c.targets]
    if cfg.bounds_inclination is None:
        return min(incs), max(incs)
    lo, hi = cfg.bounds_inclination
    for j, t in enumerate(c.targets, start=1):
        if not lo <= t.inclination <= hi:
            raise InfeasibleBounds(
                f"target {j} inclination {math.degrees(t.inclination):.4f} deg "
                f"is outside [{math.degrees(lo):.4f}, {math.degrees(hi):.4f}] deg"
            )
    return lo, hi


Objective = Callable[[Sequence[float], Sequence[float]], float]


class CampaignObjective:
    """Servicer initial mass as a function of (inclinations, arg_latitudes).

    Infeasible phasing scores +inf. Moving target j's rendezvous point only
    touches servicer legs j and j + 1 and target j's own transfers, so each call
    recomputes just the legs whose endpoints differ from the previous call. The
    arithmetic is the same as :func:`leg_delta_vs` followed by the closed form.
    """

    def __init__(self, c: Constellation, params: mm.MissionParams):
        if params.n != c.n:
            raise ValueError(f"params.n = {params.n} but the constellation has {c.n} targets")
        self.c = c
        self.params = params
        g = c.gravity
        r = c.servicer.radius(g)
        v = math.sqrt(g.mu / r)
        self._transfer = partial(_transfer, v, r, policy=c.phasing, g=g)
        self._home = (c.servicer.inclination, c.servicer.arg_latitude)
        self._slots = [(t.inclination, t.arg_latitude) for t in c.targets]
        self._c_t = params.target_exhaust_speed
        self._point: tuple[list[float], list[float]] | None = None
        self._dv_s: list[float] = []
        self._refuels: list[float] = []

    def _target_refuel(self, j: int, i_ref: float, u_ref: float) -> float:
        i_t, u_t = self._slots[j]
        dv_in = self._transfer(i_t, u_t, i_ref, u_ref)
        dv_out = self._transfer(i_ref, u_ref, i_t, u_t)
        return mm._refuel(
            self.params.target_initial_mass, self.params.refuel_for(j), dv_in, dv_out, self._c_t
        )

    def _servicer_leg(self, k: int, incs: Sequence[float], lats: Sequence[float]) -> float:
        n = self.c.n
        start = self._home if k == 0 else (incs[k - 1], lats[k - 1])
        end = self._home if k == n else (incs[k], lats[k])
        return self._transfer(start[0], start[1], end[0], end[1])

    def __call__(self, inclinations: Sequence[float], arg_latitudes: Sequence[float]) -> float:
        n = self.c.n
        incs = list(inclinations)
        lats = list(arg_latitudes)
        try:
            if self._point is None:
                changed = range(n)
                dirty_legs: Sequence[int] = range(n + 1)
                dv_s = [0.0] * (n + 1)
                refuels = [0.0] * n
            else:
                old_i, old_u = self._point
                changed = [j for j in range(n) if incs[j] != old_i[j] or lats[j] != old_u[j]]
                dirty_legs = sorted({k for j in changed for k in (j, j + 1)})
                dv_s = list(self._dv_s)
                refuels = list(self._refuels)
            for j in changed:
                refuels[j] = self._target_refuel(j, incs[j], lats[j])
            for k in dirty_legs:
                dv_s[k] = self._servicer_leg(k, incs, lats)
        except PerigeeBelowSurface:
            return math.inf
        self._point = (incs, lats)
        self._dv_s = dv_s
        self._refuels = refuels
        return mm._wet_mass(dv_s, refuels, self.params)


def make_objective(c: Constellation, params: mm.MissionParams) -> Objective:
    return CampaignObjective(c, params)


def local_refine(
    start_plan: RendezvousPlan,
    objective: Objective,
    cfg: OptimizerConfig,
    bounds: tuple[float, float],
) -> LocalResult:
    """Coordinate pattern search with step halving.

    Each sweep tries +step then -step on every coordinate and keeps any strict
    improvement at once. A sweep without improvement halves the step. The search
    stops once a failed sweep moved the objective by less than the convergence
    tolerance, the step drops below ``MIN_STEP``, or the sweep budget runs out.
    Inclinations are clamped to ``bounds``; arguments of latitude wrap.
    """
    lo, hi = bounds
    n = len(start_plan)
    x = list(start_plan.inclinations) + list(start_plan.arg_latitudes)

    def evaluate(vec: list[float]) -> float:
        return objective(vec[:n], vec[n:])

    best = evaluate(x)
    history = [best]
    step = cfg.initial_step
    for _ in range(cfg.max_local_iterations):
        improved = False
        largest_change = 0.0
        for k in range(2 * n):
            for sign in (1.0, -1.0):
                trial = list(x)
                if k < n:
                    trial[k] = min(hi, max(lo, x[k] + sign * step))
                else:
                    trial[k] = wrap_angle(x[k] + sign * step)
                if trial[k] == x[k]:
                    continue
                value = evaluate(trial)
                if math.isfinite(value):
                    largest_change = max(largest_change, abs(value - best))
                if value < best:
                    x, best = trial, value
                    improved = True
                    break
        history.append(best)
        if not improved:
            if largest_change < cfg.convergence_tolerance:
                break
            step *= 0.5
            if step < MIN_STEP:
                break
    plan = RendezvousPlan(tuple(x[:n]), tuple(x[n:]))
    return LocalResult(plan, best, tuple(history))


def _angle_gap(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def match_architecture(c: Constellation, plan: RendezvousPlan) -> Architecture | None:
    """First of A-D whose plan agrees with ``plan`` coordinate-wise within 1e-6 rad."""
    for arch in FIXED_ARCHITECTURES:
        ref = plan_for_architecture(c, arch)
        if all(
            abs(a - b) <= MATCH_TOLERANCE for a, b in zip(plan.inclinations, ref.inclinations)
        ) and all(
            _angle_gap(a, b) <= MATCH_TOLERANCE for a, b in zip(plan.arg_latitudes, ref.arg_latitudes)
        ):
            return arch
    return None


def starting_plans(
    c: Constellation, cfg: OptimizerConfig, bounds: tuple[float, float]
) -> list[RendezvousPlan]:
    """Plans A-D followed by uniform random plans, ``max(num_starts, 4)`` in total."""
    plans = [plan_for_architecture(c, arch) for arch in FIXED_ARCHITECTURES]
    rng = np.random.default_rng(cfg.rng_seed)
    lo, hi = bounds
    for _ in range(cfg.num_starts - len(plans)):
        incs = rng.uniform(lo, hi, size=c.n)
        lats = rng.uniform(0.0, TWO_PI, size=c.n)
        plans.append(
            RendezvousPlan(tuple(float(i) for i in incs), tuple(wrap_angle(float(u)) for u in lats))
        )
    return plans


def optimize_plan(
    c: Constellation, params: mm.MissionParams, cfg: OptimizerConfig | None = None
) -> OptimizationReport:
    cfg = cfg or OptimizerConfig()
    if params.n != c.n:
        raise ValueError(f"params.n = {params.n} but the constellation has {c.n} targets")
    bounds = inclination_bounds(c, cfg)
    objective = make_objective(c, params)

    baselines = {
        arch: initial_mass(build_budget(c, plan), params).servicer_initial_mass
        for arch, plan in ((a, plan_for_architecture(c, a)) for a in FIXED_ARCHITECTURES)
    }
    best: LocalResult | None = None
    history = []
    for index, start in enumerate(starting_plans(c, cfg, bounds)):
        local = local_refine(start, objective, cfg, bounds)
        history.append((index, local.objective))
        # strict comparison keeps the lowest start index on ties
        if best is None or local.objective < best.objective:
            best = local
    assert best is not None
    if not math.isfinite(best.objective):
        raise PerigeeBelowSurface("every start produced an infeasible phasing orbit")
    result = initial_mass(build_budget(c, best.plan), params)
    return OptimizationReport(
        best_plan=best.plan,
        best_result=result,
        matched_architecture=match_architecture(c, best.plan),
        per_start_history=tuple(history),
        baselines=baselines,
    )
