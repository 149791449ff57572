import math

import pytest

from refuelarch.campaign import Constellation
from refuelarch.config import load_config
from refuelarch.massmodel import MissionParams
from refuelarch.orbits import CircularOrbit

ALT = 550.0
TABLE_MASSES = dict(target_initial_mass=1000.0, required_refuel=200.0)


def orbit(inc_deg: float, u_deg: float = 0.0) -> CircularOrbit:
    return CircularOrbit(ALT, math.radians(inc_deg), math.radians(u_deg) % (2 * math.pi))


def constellation(targets, servicer=(53.0, 0.0)) -> Constellation:
    return Constellation(orbit(*servicer), tuple(orbit(*t) for t in targets))


def params(n: int, ratio: float = 1.0, isp_t: float = 300.0, isp_s: float = 300.0) -> MissionParams:
    return MissionParams(
        n=n,
        servicer_final_mass=ratio * TABLE_MASSES["target_initial_mass"],
        isp_servicer=isp_s,
        isp_target=isp_t,
        **TABLE_MASSES,
    )


@pytest.fixture(scope="session")
def set_a():
    return load_config("starlink_like")


@pytest.fixture(scope="session")
def set_b():
    return load_config("set_b")


def grid_optimum(c: Constellation, p: MissionParams, step_deg: float = 0.5):
    """Dense-grid global search for a single target.

    Returns (best value, best (i, u) in degrees, largest objective change
    between the best cell and its eight neighbours).
    """
    from refuelarch.campaign import RendezvousPlan, build_budget, initial_mass
    from refuelarch.orbits import PerigeeBelowSurface

    assert c.n == 1
    incs = [c.servicer.inclination, c.targets[0].inclination]
    lo, hi = math.degrees(min(incs)), math.degrees(max(incs))
    i_grid = [lo + k * step_deg for k in range(int(round((hi - lo) / step_deg)) + 1)]
    u_grid = [k * step_deg for k in range(int(round(360.0 / step_deg)))]

    def f(i_deg, u_deg):
        plan = RendezvousPlan((math.radians(i_deg),), (math.radians(u_deg % 360.0),))
        try:
            return initial_mass(build_budget(c, plan), p).servicer_initial_mass
        except PerigeeBelowSurface:
            return math.inf

    values = {(a, b): f(i_grid[a], u_grid[b]) for a in range(len(i_grid)) for b in range(len(u_grid))}
    (a0, b0), best = min(values.items(), key=lambda kv: kv[1])
    variation = 0.0
    for da in (-1, 0, 1):
        for db in (-1, 0, 1):
            a, b = a0 + da, (b0 + db) % len(u_grid)
            if 0 <= a < len(i_grid) and math.isfinite(values[(a, b)]):
                variation = max(variation, abs(values[(a, b)] - best))
    return best, (i_grid[a0], u_grid[b0]), variation


VERDICTS: list[str] = []


def verdict(criterion: int, ok: bool, detail: str) -> None:
    """Record and print one acceptance line; the summary hook repeats them."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    VERDICTS.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
