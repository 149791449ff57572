"""Trade-study commands behind the CLI: compare, critical ratio, sweep, optimize.

Each command returns plain rows (lists of dicts) so the CLI only has to render
them. Float columns are formatted to 9 significant digits when written as CSV.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import replace
from typing import Any, Iterable, Sequence

from . import massmodel as mm
from .campaign import (
    FIXED_ARCHITECTURES,
    Architecture,
    Constellation,
    build_budget,
    evaluate_architecture,
    plan_for_architecture,
)
from .config import IspPair, StudyConfig, parse_pair
from .optimizer import OptimizationReport, OptimizerConfig, optimize_plan


def params_at(
    params: mm.MissionParams,
    mass_ratio: float | None = None,
    n: int | None = None,
    isp: IspPair | None = None,
) -> mm.MissionParams:
    """Mission parameters at one sweep point; target mass stays fixed, servicer dry mass scales."""
    changes: dict[str, Any] = {}
    if n is not None and n != params.n:
        changes["n"] = n
        if isinstance(params.required_refuel, tuple):
            changes["required_refuel"] = params.required_refuel[:n]
    if mass_ratio is not None:
        if not mass_ratio > 0:
            raise ValueError(f"mass ratio must be positive, got {mass_ratio}")
        changes["servicer_final_mass"] = mass_ratio * params.target_initial_mass
    if isp is not None:
        changes["isp_target"] = isp.isp_target
        changes["isp_servicer"] = isp.isp_servicer
    return replace(params, **changes) if changes else params


def critical_ratio(c: Constellation, params: mm.MissionParams, pair: str = "A-D") -> float:
    """Critical mass ratio between non-cooperative A and the cooperative partner of ``pair``.

    Raises:
        NoCrossover: The two servicer delta-v totals coincide.
    """
    _, coop = parse_pair(pair)
    b_n = build_budget(c, plan_for_architecture(c, Architecture.A))
    b_c = build_budget(c, plan_for_architecture(c, coop))
    return mm.critical_mass_ratio(b_c, b_n, params)


def critical_ratio_a_d(c: Constellation, params: mm.MissionParams) -> float:
    b_n = build_budget(c, plan_for_architecture(c, Architecture.A))
    b_d = build_budget(c, plan_for_architecture(c, Architecture.D))
    return mm.critical_mass_ratio_a_d(b_n, b_d, params)


def recommend(initial_masses: dict[str, float]) -> str:
    """Architecture with the lightest servicer; ties go to the earliest letter."""
    return min(sorted(initial_masses), key=lambda a: initial_masses[a])


def cmd_compare(
    c: Constellation,
    params: mm.MissionParams,
    mass_ratio: float,
    include_optimizer: bool = False,
    optimizer: OptimizerConfig | None = None,
) -> list[dict[str, Any]]:
    """One row per architecture at ``m_s,F = mass_ratio * m_t,I``."""
    p = params_at(params, mass_ratio=mass_ratio)
    results: dict[str, mm.CampaignResult] = {
        arch.value: evaluate_architecture(c, arch, p) for arch in FIXED_ARCHITECTURES
    }
    if include_optimizer:
        report = optimize_plan(c, p, optimizer)
        results[Architecture.E.value] = report.best_result
    best = recommend({a: r.servicer_initial_mass for a, r in results.items()})
    return [
        {
            "architecture": arch,
            "mass_ratio": mass_ratio,
            "initial_mass_kg": r.servicer_initial_mass,
            "variable_fuel_kg": r.variable_fuel_mass,
            "servicer_fuel_kg": r.servicer_fuel_consumed,
            "target_fuel_kg": r.target_fuel_consumed,
            "recommended": arch == best,
        }
        for arch, r in results.items()
    ]


def cmd_critical_ratio(
    c: Constellation,
    params: mm.MissionParams,
    pair: str = "A-D",
    n_values: Iterable[int] | None = None,
) -> list[dict[str, Any]]:
    """Critical ratio for targets 1..n, for each n; rows without a crossover are flagged."""
    rows = []
    for n in n_values if n_values is not None else range(1, c.n + 1):
        cn = c.truncated(n)
        pn = params_at(params, n=n)
        row: dict[str, Any] = {"n": n, "pair": pair}
        try:
            row["critical_ratio"] = critical_ratio(cn, pn, pair)
            row["no_crossover"] = False
        except mm.NoCrossover:
            row["critical_ratio"] = None
            row["no_crossover"] = True
        rows.append(row)
    return rows


def _sweep_constellations(c: Constellation, study: StudyConfig) -> list[tuple[str, Constellation]]:
    if not study.target_sets:
        return [("config", c)]
    return [(name, c.with_inclinations(incs)) for name, incs in study.target_sets.items()]


def cmd_sweep(c: Constellation, params: mm.MissionParams, study: StudyConfig) -> list[dict[str, Any]]:
    """Cartesian sweep: target set x n x Isp pair x mass ratio, in that nesting order."""
    _, coop = parse_pair(study.pair)
    archs = [a.value for a in FIXED_ARCHITECTURES]
    if study.include_optimizer:
        archs.append(Architecture.E.value)
    rows = []
    for set_name, cs in _sweep_constellations(c, study):
        for n in study.n_values:
            cn = cs.truncated(n)
            for isp in study.isp_pairs:
                base = params_at(params, n=n, isp=isp)
                try:
                    alpha = critical_ratio(cn, base, study.pair)
                except mm.NoCrossover:
                    alpha = None
                try:
                    alpha_ad = critical_ratio_a_d(cn, base)
                except mm.NoCrossover:
                    alpha_ad = None
                for ratio in study.mass_ratios:
                    p = params_at(base, mass_ratio=ratio)
                    results = {a: evaluate_architecture(cn, a, p) for a in archs if a != "E"}
                    if study.include_optimizer:
                        results["E"] = optimize_plan(cn, p, study.optimizer).best_result
                    row: dict[str, Any] = {
                        "target_set": set_name,
                        "n": n,
                        "isp_target_s": isp.isp_target,
                        "isp_servicer_s": isp.isp_servicer,
                        "mass_ratio": ratio,
                    }
                    for a in archs:
                        row[f"variable_fuel_{a}_kg"] = results[a].variable_fuel_mass
                    for a in archs:
                        row[f"initial_mass_{a}_kg"] = results[a].servicer_initial_mass
                    row[f"critical_ratio_A_{coop}"] = alpha
                    row["critical_ratio_A_D_closed_form"] = alpha_ad
                    row["recommendation"] = recommend(
                        {a: r.servicer_initial_mass for a, r in results.items()}
                    )
                    rows.append(row)
    return rows


def cmd_optimize(
    c: Constellation,
    params: mm.MissionParams,
    mass_ratio: float,
    optimizer: OptimizerConfig,
) -> tuple[OptimizationReport, dict[str, Any]]:
    """Run architecture E and return the report plus its structured rendering."""
    p = params_at(params, mass_ratio=mass_ratio)
    report = optimize_plan(c, p, optimizer)
    return report, report_to_dict(report, optimizer, mass_ratio)


def report_to_dict(report: OptimizationReport, cfg: OptimizerConfig, mass_ratio: float) -> dict[str, Any]:
    r = report.best_result
    return {
        "seed": cfg.rng_seed,
        "num_starts": max(cfg.num_starts, len(FIXED_ARCHITECTURES)),
        "mass_ratio": mass_ratio,
        "n": len(report.best_plan),
        "objective_kg": r.servicer_initial_mass,
        "variable_fuel_kg": r.variable_fuel_mass,
        "servicer_fuel_kg": r.servicer_fuel_consumed,
        "target_fuel_kg": r.target_fuel_consumed,
        "matched_architecture": (
            None if report.matched_architecture is None else report.matched_architecture.value
        ),
        "baseline_initial_mass_kg": {a.value: m for a, m in report.baselines.items()},
        "plan": [
            {"target": j, "i_ref_deg": math.degrees(i), "u_ref_deg": math.degrees(u)}
            for j, (i, u) in enumerate(
                zip(report.best_plan.inclinations, report.best_plan.arg_latitudes), start=1
            )
        ],
        "per_start": [
            {"start": k, "objective_kg": value if math.isfinite(value) else None}
            for k, value in report.per_start_history
        ],
    }


# -- rendering -------------------------------------------------------------------

def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def to_csv(rows: Sequence[dict[str, Any]]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(row.get(key)) for key in header])
    return buf.getvalue()


def to_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"
