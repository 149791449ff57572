"""JSON study configuration: parsing, validation, and serialization.

Degrees and kilograms live in the file; everything returned is in radians and
the units of :mod:`refuelarch.orbits` / :mod:`refuelarch.massmodel`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .campaign import Constellation
from .massmodel import G0, MissionParams
from .optimizer import OptimizerConfig
from .orbits import EARTH_RADIUS, MU_EARTH, CircularOrbit, GravityModel, PhasingPolicy

BUNDLED = ("starlink_like", "set_b", "set_c", "set_d", "set_e")


class ConfigError(Exception):
    pass


class ParseError(ConfigError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


class ValidationError(ConfigError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class IspPair:
    isp_target: float
    isp_servicer: float


@dataclass(frozen=True)
class StudyConfig:
    """Sweep axes and output settings; angles in radians."""

    source: Path | None = None
    mass_ratios: tuple[float, ...] = (1.0,)
    n_values: tuple[int, ...] = ()
    isp_pairs: tuple[IspPair, ...] = ()
    # name -> per-target inclinations; empty means only the configured targets
    target_sets: dict[str, tuple[float, ...]] = field(default_factory=dict)
    pair: str = "A-D"
    include_optimizer: bool = False
    output_format: str = "csv"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)


def bundled_config(name: str) -> Path:
    """Path of a config shipped with the package, e.g. ``starlink_like``."""
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise ConfigError(f"no bundled config named {name!r}; choose from {', '.join(BUNDLED)}")
    return Path(str(resources.files("refuelarch") / "data" / f"{stem}.json"))


def resolve_config_path(path: str | Path) -> Path:
    p = Path(path)
    if p.exists():
        return p
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    if p.parent == Path(".") and stem in BUNDLED:
        return bundled_config(stem)
    raise ConfigError(f"config file {path} does not exist")


def load_config(path: str | Path) -> tuple[Constellation, MissionParams, StudyConfig]:
    """Read, validate and convert a study configuration file.

    Raises:
        ParseError: The file is not valid JSON.
        ValidationError: A field is missing or violates its domain.
    """
    p = resolve_config_path(path)
    text = p.read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    return parse_config(raw, source=p)


# -- helpers -----------------------------------------------------------------

def _section(raw: dict, name: str, required: bool = False) -> dict:
    if name not in raw:
        if required:
            raise ValidationError(name, "section is required")
        return {}
    value = raw[name]
    if not isinstance(value, dict):
        raise ValidationError(name, "must be an object")
    return value


def _number(sec: dict, key: str, where: str, default: Any = None, *, positive: bool = False,
            non_negative: bool = False) -> float:
    name = f"{where}.{key}"
    if key not in sec:
        if default is None:
            raise ValidationError(name, "is required")
        return float(default)
    value = sec[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValidationError(name, f"must be a finite number, got {value!r}")
    if positive and not value > 0:
        raise ValidationError(name, f"must be > 0, got {value}")
    if non_negative and value < 0:
        raise ValidationError(name, f"must be >= 0, got {value}")
    return float(value)


def _integer(sec: dict, key: str, where: str, default: int, minimum: int) -> int:
    name = f"{where}.{key}"
    value = sec.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(name, f"must be an integer, got {value!r}")
    if value < minimum:
        raise ValidationError(name, f"must be >= {minimum}, got {value}")
    return value


def _inclination(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(name, f"must be a number, got {value!r}")
    if not 0.0 <= value <= 180.0:
        raise ValidationError(name, f"inclination must lie in [0, 180] deg, got {value}")
    return math.radians(value)


def _arg_latitude(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(name, f"must be a number, got {value!r}")
    if not 0.0 <= value < 360.0:
        raise ValidationError(name, f"argument of latitude must lie in [0, 360) deg, got {value}")
    u = math.radians(value)
    return 0.0 if u >= 2.0 * math.pi else u


def _range(spec: Any, name: str) -> tuple[float, ...]:
    """``{"start", "stop", "step"}`` inclusive of stop, or an explicit list."""
    if isinstance(spec, list):
        if not spec:
            raise ValidationError(name, "axis is empty")
        return tuple(_number({"v": v}, "v", name, positive=True) for v in spec)
    if not isinstance(spec, dict):
        raise ValidationError(name, "must be a list or an object with start/stop/step")
    start = _number(spec, "start", name, positive=True)
    stop = _number(spec, "stop", name, positive=True)
    step = _number(spec, "step", name, positive=True)
    if stop < start:
        raise ValidationError(name, "axis is empty (stop < start)")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # built from the index to keep values like 0.5 * k exact
    return tuple(round(start + k * step, 12) for k in range(count))


# -- parsing -------------------------------------------------------------------

def parse_config(raw: Any, source: Path | None = None) -> tuple[Constellation, MissionParams, StudyConfig]:
    if not isinstance(raw, dict):
        raise ValidationError("<root>", "top level must be an object")

    grav = _section(raw, "gravity")
    try:
        gravity = GravityModel(
            mu=_number(grav, "mu_km3_s2", "gravity", MU_EARTH, positive=True),
            earth_radius=_number(grav, "earth_radius_km", "gravity", EARTH_RADIUS, positive=True),
        )
    except ValueError as exc:
        raise ValidationError("gravity", str(exc)) from exc

    ph = _section(raw, "phasing")
    phasing = PhasingPolicy(
        k1=_integer(ph, "k1", "phasing", 1, 1),
        k2=_integer(ph, "k2", "phasing", 1, 0),
    )

    con = _section(raw, "constellation", required=True)
    altitude = _number(con, "altitude_km", "constellation", 550.0, positive=True)
    serv = con.get("servicer", {})
    if not isinstance(serv, dict):
        raise ValidationError("constellation.servicer", "must be an object")
    servicer = CircularOrbit(
        altitude,
        _inclination(serv.get("inclination_deg", 53.0), "constellation.servicer.inclination_deg"),
        _arg_latitude(serv.get("arg_latitude_deg", 0.0), "constellation.servicer.arg_latitude_deg"),
    )
    if "targets" not in con:
        raise ValidationError("constellation.targets", "is required")
    targets_raw = con["targets"]
    if not isinstance(targets_raw, list) or not targets_raw:
        raise ValidationError("constellation.targets", "must be a non-empty list")
    targets = []
    for j, t in enumerate(targets_raw, start=1):
        where = f"constellation.targets[{j}]"
        if not isinstance(t, dict):
            raise ValidationError(where, "must be an object")
        for key in ("inclination_deg", "arg_latitude_deg"):
            if key not in t:
                raise ValidationError(f"{where}.{key}", "is required")
        targets.append(
            CircularOrbit(
                altitude,
                _inclination(t["inclination_deg"], f"{where}.inclination_deg"),
                _arg_latitude(t["arg_latitude_deg"], f"{where}.arg_latitude_deg"),
            )
        )
    constellation = Constellation(servicer, tuple(targets), gravity, phasing)

    mis = _section(raw, "mission")
    refuel_raw = mis.get("required_refuel_kg", 200.0)
    if isinstance(refuel_raw, list):
        if len(refuel_raw) != len(targets):
            raise ValidationError("mission.required_refuel_kg", "needs one entry per target")
        refuel: float | tuple[float, ...] = tuple(
            _number({"v": v}, "v", "mission.required_refuel_kg", non_negative=True) for v in refuel_raw
        )
    else:
        refuel = _number(mis, "required_refuel_kg", "mission", 200.0, non_negative=True)
    params = MissionParams(
        n=len(targets),
        servicer_final_mass=_number(mis, "servicer_final_mass_kg", "mission", 1000.0, positive=True),
        target_initial_mass=_number(mis, "target_initial_mass_kg", "mission", 1000.0, positive=True),
        required_refuel=refuel,
        isp_servicer=_number(mis, "isp_servicer_s", "mission", 300.0, positive=True),
        isp_target=_number(mis, "isp_target_s", "mission", 300.0, positive=True),
        g0=_number(mis, "g0_m_s2", "mission", G0, positive=True),
    )

    opt = _section(raw, "optimizer")
    bounds_raw = opt.get("inclination_bounds_deg")
    bounds = None
    if bounds_raw is not None:
        if not (isinstance(bounds_raw, list) and len(bounds_raw) == 2):
            raise ValidationError("optimizer.inclination_bounds_deg", "must be [low, high]")
        lo = _inclination(bounds_raw[0], "optimizer.inclination_bounds_deg[0]")
        hi = _inclination(bounds_raw[1], "optimizer.inclination_bounds_deg[1]")
        if lo > hi:
            raise ValidationError("optimizer.inclination_bounds_deg", "low exceeds high")
        bounds = (lo, hi)
    seed = opt.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ValidationError("optimizer.seed", f"must be an unsigned 64-bit integer, got {seed!r}")
    optimizer = OptimizerConfig(
        num_starts=_integer(opt, "num_starts", "optimizer", 44, 1),
        rng_seed=seed,
        max_local_iterations=_integer(opt, "max_local_iterations", "optimizer", 500, 1),
        convergence_tolerance=_number(opt, "convergence_tolerance_kg", "optimizer", 1e-6, positive=True),
        initial_step=math.radians(_number(opt, "initial_step_deg", "optimizer", 5.0, positive=True)),
        bounds_inclination=bounds,
    )

    sw = _section(raw, "sweeps")
    mass_ratios = _range(sw["mass_ratio"], "sweeps.mass_ratio") if "mass_ratio" in sw else (1.0,)
    n_values: tuple[int, ...] = (len(targets),)
    if "n_range" in sw:
        nr = sw["n_range"]
        if not (isinstance(nr, list) and len(nr) == 2 and all(isinstance(v, int) for v in nr)):
            raise ValidationError("sweeps.n_range", "must be [first, last] integers")
        if not 1 <= nr[0] <= nr[1] <= len(targets):
            raise ValidationError("sweeps.n_range", f"must satisfy 1 <= first <= last <= {len(targets)}")
        n_values = tuple(range(nr[0], nr[1] + 1))
    isp_pairs = (IspPair(params.isp_target, params.isp_servicer),)
    if "isp_pairs" in sw:
        ip = sw["isp_pairs"]
        if not isinstance(ip, list) or not ip:
            raise ValidationError("sweeps.isp_pairs", "axis is empty")
        pairs = []
        for k, item in enumerate(ip):
            if not isinstance(item, dict):
                raise ValidationError(f"sweeps.isp_pairs[{k}]", "must be an object")
            pairs.append(IspPair(
                _number(item, "isp_target_s", f"sweeps.isp_pairs[{k}]", positive=True),
                _number(item, "isp_servicer_s", f"sweeps.isp_pairs[{k}]", positive=True),
            ))
        isp_pairs = tuple(pairs)
    target_sets: dict[str, tuple[float, ...]] = {}
    for name, incs in _section(sw, "target_sets").items():
        where = f"sweeps.target_sets.{name}"
        if not isinstance(incs, list) or len(incs) != len(targets):
            raise ValidationError(where, f"needs {len(targets)} inclinations")
        target_sets[name] = tuple(_inclination(v, f"{where}[{k}]") for k, v in enumerate(incs))
    pair = sw.get("pair", "A-D")
    _check_pair(pair, "sweeps.pair")
    include_optimizer = sw.get("include_optimizer", False)
    if not isinstance(include_optimizer, bool):
        raise ValidationError("sweeps.include_optimizer", "must be true or false")

    out = _section(raw, "output")
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ValidationError("output.format", f"must be csv or json, got {fmt!r}")

    study = StudyConfig(
        source=source,
        mass_ratios=mass_ratios,
        n_values=n_values,
        isp_pairs=isp_pairs,
        target_sets=target_sets,
        pair=pair,
        include_optimizer=include_optimizer,
        output_format=fmt,
        optimizer=optimizer,
    )
    return constellation, params, study


def _check_pair(pair: Any, name: str) -> tuple[str, str]:
    if not isinstance(pair, str) or len(pair.split("-")) != 2:
        raise ValidationError(name, f"must look like A-D, got {pair!r}")
    first, second = pair.split("-")
    if first != "A":
        raise ValidationError(name, "the first architecture must be the non-cooperative A")
    if second not in ("B", "C", "D"):
        raise ValidationError(name, f"the second architecture must be B, C or D, got {second!r}")
    return first, second


def parse_pair(pair: str) -> tuple[str, str]:
    return _check_pair(pair, "pair")


# -- serialization -------------------------------------------------------------

def _deg(rad: float) -> float:
    """Degrees that convert back to exactly ``rad``, so dump -> load is lossless."""
    d = math.degrees(rad)
    lo = hi = d
    for _ in range(4):
        for cand in (lo, hi):
            if math.radians(cand) == rad:
                return cand
        lo, hi = math.nextafter(lo, -math.inf), math.nextafter(hi, math.inf)
    return d


def _orbit_dict(o: CircularOrbit) -> dict:
    return {
        "inclination_deg": _deg(o.inclination),
        "arg_latitude_deg": _deg(o.arg_latitude),
    }


def config_to_dict(c: Constellation, params: MissionParams, study: StudyConfig) -> dict:
    """Inverse of :func:`parse_config`, in file units."""
    opt = study.optimizer
    refuel = params.required_refuel
    raw: dict[str, Any] = {
        "gravity": {"mu_km3_s2": c.gravity.mu, "earth_radius_km": c.gravity.earth_radius},
        "phasing": {"k1": c.phasing.k1, "k2": c.phasing.k2},
        "constellation": {
            "altitude_km": c.servicer.altitude,
            "servicer": _orbit_dict(c.servicer),
            "targets": [_orbit_dict(t) for t in c.targets],
        },
        "mission": {
            "servicer_final_mass_kg": params.servicer_final_mass,
            "target_initial_mass_kg": params.target_initial_mass,
            "required_refuel_kg": list(refuel) if isinstance(refuel, tuple) else refuel,
            "isp_servicer_s": params.isp_servicer,
            "isp_target_s": params.isp_target,
            "g0_m_s2": params.g0,
        },
        "optimizer": {
            "num_starts": opt.num_starts,
            "seed": opt.rng_seed,
            "max_local_iterations": opt.max_local_iterations,
            "convergence_tolerance_kg": opt.convergence_tolerance,
            "initial_step_deg": _deg(opt.initial_step),
            "inclination_bounds_deg": (
                None if opt.bounds_inclination is None
                else [_deg(b) for b in opt.bounds_inclination]
            ),
        },
        "sweeps": {
            "mass_ratio": list(study.mass_ratios),
            "n_range": [min(study.n_values), max(study.n_values)],
            "isp_pairs": [
                {"isp_target_s": p.isp_target, "isp_servicer_s": p.isp_servicer}
                for p in study.isp_pairs
            ],
            "target_sets": {
                name: [_deg(i) for i in incs] for name, incs in study.target_sets.items()
            },
            "pair": study.pair,
            "include_optimizer": study.include_optimizer,
        },
        "output": {"format": study.output_format},
    }
    return raw


def dump_config(c: Constellation, params: MissionParams, study: StudyConfig) -> str:
    return json.dumps(config_to_dict(c, params, study), indent=2) + "\n"
