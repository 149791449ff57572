"""Command line entry point: ``refuelarch <command> --config FILE``.

Exit codes: 0 success, 2 configuration error, 3 infeasible phasing geometry,
4 no crossover when a single critical ratio was requested.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import study
from .config import ConfigError, ValidationError, load_config, parse_pair
from .massmodel import NoCrossover
from .optimizer import InfeasibleBounds
from .orbits import PerigeeBelowSurface

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NO_CROSSOVER = 4


def write_output(text: str, out: str | None) -> None:
    """Write to stdout, or atomically replace ``out``."""
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def parse_n_range(text: str) -> tuple[int, int]:
    """``"3..7"`` -> (3, 7); a bare ``"5"`` means (5, 5)."""
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise ValidationError("--n-range", f"expected A..B, got {text!r}") from None
    if not 1 <= lo <= hi:
        raise ValidationError("--n-range", f"need 1 <= A <= B, got {text!r}")
    return lo, hi


def _render(rows, fmt: str) -> str:
    return study.to_json(rows) if fmt == "json" else study.to_csv(rows)


def _fmt(args, study_cfg) -> str:
    return args.format or study_cfg.output_format


def run_validate(args) -> int:
    c, params, cfg = load_config(args.config)
    lines = [
        f"config: {cfg.source}",
        f"targets: {c.n}",
        f"altitude_km: {c.servicer.altitude:g}",
        "inclinations_deg: "
        + ", ".join(sorted({f"{math.degrees(t.inclination):g}" for t in c.targets}, key=float)),
        f"mass_ratios: {len(cfg.mass_ratios)}",
        f"n_values: {cfg.n_values[0]}..{cfg.n_values[-1]}",
        f"isp_pairs: {len(cfg.isp_pairs)}",
        f"target_sets: {', '.join(cfg.target_sets) or '-'}",
        "ok",
    ]
    write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def run_compare(args) -> int:
    c, params, cfg = load_config(args.config)
    ratio = args.mass_ratio if args.mass_ratio is not None else params.servicer_final_mass / params.target_initial_mass
    opt = cfg.optimizer
    if args.seed is not None:
        opt = replace(opt, rng_seed=args.seed)
    if args.starts is not None:
        opt = replace(opt, num_starts=args.starts)
    rows = study.cmd_compare(
        c, params, ratio, include_optimizer=args.optimize or cfg.include_optimizer, optimizer=opt
    )
    write_output(_render(rows, _fmt(args, cfg)), args.out)
    return EXIT_OK


def run_critical_ratio(args) -> int:
    c, params, cfg = load_config(args.config)
    pair = args.pair or cfg.pair
    parse_pair(pair)
    if args.n_range is not None:
        lo, hi = parse_n_range(args.n_range)
        if hi > c.n:
            raise ValidationError("--n-range", f"upper bound {hi} exceeds the {c.n} configured targets")
        n_values = range(lo, hi + 1)
    else:
        n_values = cfg.n_values
    rows = study.cmd_critical_ratio(c, params, pair, n_values)
    write_output(_render(rows, _fmt(args, cfg)), args.out)
    if len(rows) == 1 and rows[0]["no_crossover"]:
        _error("no crossover: both architectures need the same servicer delta-v")
        return EXIT_NO_CROSSOVER
    return EXIT_OK


def run_sweep(args) -> int:
    c, params, cfg = load_config(args.config)
    if args.optimize:
        cfg = replace(cfg, include_optimizer=True)
    rows = study.cmd_sweep(c, params, cfg)
    write_output(_render(rows, _fmt(args, cfg)), args.out)
    return EXIT_OK


def run_optimize(args) -> int:
    c, params, cfg = load_config(args.config)
    opt = cfg.optimizer
    if args.seed is not None:
        opt = replace(opt, rng_seed=args.seed)
    if args.starts is not None:
        opt = replace(opt, num_starts=args.starts)
    if args.n is not None:
        c = c.truncated(args.n)
        params = study.params_at(params, n=args.n)
    ratio = args.mass_ratio if args.mass_ratio is not None else params.servicer_final_mass / params.target_initial_mass
    _, payload = study.cmd_optimize(c, params, ratio, opt)
    if _fmt(args, cfg) == "json":
        text = study.to_json(payload)
    else:
        rows = [
            {
                "seed": payload["seed"],
                "mass_ratio": payload["mass_ratio"],
                "objective_kg": payload["objective_kg"],
                "matched_architecture": payload["matched_architecture"] or "",
                **p,
            }
            for p in payload["plan"]
        ]
        text = study.to_csv(rows)
    write_output(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refuelarch",
        description="Compare cooperative and non-cooperative multi-target refueling architectures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, metavar="PATH",
                       help="study config (JSON) or a bundled name such as starlink_like")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--out", metavar="PATH", default=None, help="write here instead of stdout")

    p = sub.add_parser("validate", help="load and check a config")
    common(p)
    p.set_defaults(func=run_validate)

    p = sub.add_parser("compare", help="architectures A-D (and E) at one mass ratio")
    common(p)
    p.add_argument("--mass-ratio", type=float, default=None, metavar="F")
    p.add_argument("--optimize", action="store_true", help="also run architecture E")
    p.add_argument("--seed", type=int, default=None, metavar="N")
    p.add_argument("--starts", type=int, default=None, metavar="N")
    p.set_defaults(func=run_compare)

    p = sub.add_parser("critical-ratio", help="critical mass ratio against the number of targets")
    common(p)
    p.add_argument("--pair", default=None, metavar="X-Y", help="default A-D")
    p.add_argument("--n-range", default=None, metavar="A..B")
    p.set_defaults(func=run_critical_ratio)

    p = sub.add_parser("sweep", help="cartesian sweep over the configured axes")
    common(p)
    p.add_argument("--optimize", action="store_true", help="add architecture E columns")
    p.set_defaults(func=run_sweep)

    p = sub.add_parser("optimize", help="optimize the rendezvous points (architecture E)")
    common(p)
    p.add_argument("--mass-ratio", type=float, default=None, metavar="F")
    p.add_argument("--seed", type=int, default=None, metavar="N")
    p.add_argument("--starts", type=int, default=None, metavar="N")
    p.add_argument("--n", type=int, default=None, help="serve only targets 1..N")
    p.set_defaults(func=run_optimize)
    return parser


def _error(message: str) -> None:
    print(f"refuelarch: error: {message}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InfeasibleBounds) as exc:
        _error(f"config error: {exc}")
        return EXIT_CONFIG
    except PerigeeBelowSurface as exc:
        _error(f"infeasible geometry: {exc}")
        return EXIT_INFEASIBLE
    except NoCrossover as exc:
        _error(f"no crossover: {exc}")
        return EXIT_NO_CROSSOVER
    except ValueError as exc:
        _error(f"invalid input: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
