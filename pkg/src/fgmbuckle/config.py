"""Run configuration: JSON schema, exhaustive validation and sweep grids.

The format is versioned JSON. Unknown keys are hard errors so a typo in a
parametric study cannot silently fall back to a default, and validation
reports every problem at once rather than the first.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Any

from .geometry import (CircleCutout, CrackSpec, DefectSet, EllipseCutout,
                       PlateGeometry, validate_defects)
from .materials import BUILTIN_PAIRS, PhaseProperties, material_pair

SCHEMA_VERSION = 1

SWEEPABLE = ("gradient_index", "crack_length_ratio", "crack_angle_deg",
             "cutout_radius_ratio", "aspect_ratio", "side_to_thickness",
             "defect_count")


class ConfigError(ValueError):
    """Carries the full list of validation problems."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class MaterialConfig:
    ceramic: PhaseProperties
    metal: PhaseProperties
    gradient_index: float = 0.0
    shear_correction: float = 5.0 / 6.0


@dataclass(frozen=True)
class MeshConfig:
    nx: int = 40
    ny: int = 40


@dataclass(frozen=True)
class LoadConfig:
    kind: str = "uniaxial"           # uniaxial | biaxial | thermal
    profile: str = "nonlinear"       # thermal only: linear | nonlinear
    metal_surface_rise: float = 5.0  # degC above reference at z = -h/2
    reference_temp: float = 0.0
    strict_reference: bool = False   # drop the fixed-rise prestress term


@dataclass(frozen=True)
class SweepConfig:
    grid: dict[str, tuple[float, ...]]


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "."
    csv: str = "results.csv"
    mode_shape: bool = False


@dataclass(frozen=True)
class RunConfig:
    plate: PlateGeometry
    material: MaterialConfig
    mesh: MeshConfig = field(default_factory=MeshConfig)
    defects: DefectSet = field(default_factory=DefectSet)
    boundary: str = "SSSS"
    load: LoadConfig = field(default_factory=LoadConfig)
    sweep: SweepConfig | None = None
    output: OutputConfig = field(default_factory=OutputConfig)


def _check_keys(block: dict, allowed: set[str], where: str, errors: list[str]) -> None:
    for key in block:
        if key not in allowed:
            errors.append(f"{where}: unknown key {key!r}")


def _get_number(block: dict, key: str, where: str, errors: list[str],
                default=None, positive=False):
    if key not in block:
        if default is None:
            errors.append(f"{where}: missing required key {key!r}")
            return None
        return default
    val = block[key]
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        errors.append(f"{where}.{key}: expected a number, got {val!r}")
        return None
    if positive and val <= 0:
        errors.append(f"{where}.{key}: must be positive, got {val}")
        return None
    return float(val)


def _parse_phase(block: Any, where: str, errors: list[str]) -> PhaseProperties | None:
    if not isinstance(block, dict):
        errors.append(f"{where}: expected an object with phase properties")
        return None
    allowed = {"youngs_modulus", "poisson_ratio", "thermal_expansion",
               "conductivity", "density"}
    _check_keys(block, allowed, where, errors)
    vals = {}
    for key in allowed:
        vals[key] = _get_number(block, key, where, errors)
    if any(v is None for v in vals.values()):
        return None
    try:
        return PhaseProperties(**vals)
    except ValueError as exc:
        errors.append(f"{where}: {exc}")
        return None


def _parse_defect(block: Any, index: int, errors: list[str]):
    where = f"defects[{index}]"
    if not isinstance(block, dict):
        errors.append(f"{where}: expected an object")
        return None
    kind = block.get("type")
    if kind == "crack":
        _check_keys(block, {"type", "center", "length", "angle_deg"}, where, errors)
        center = block.get("center")
        length = _get_number(block, "length", where, errors, positive=True)
        angle = _get_number(block, "angle_deg", where, errors, default=0.0)
        if (not isinstance(center, (list, tuple)) or len(center) != 2
                or length is None or angle is None):
            if not isinstance(center, (list, tuple)) or len(center) != 2:
                errors.append(f"{where}.center: expected [x, y]")
            return None
        return CrackSpec(center=(float(center[0]), float(center[1])),
                         length=length, angle=math.radians(angle))
    if kind == "circle":
        _check_keys(block, {"type", "center", "radius"}, where, errors)
        center = block.get("center")
        radius = _get_number(block, "radius", where, errors, positive=True)
        if not isinstance(center, (list, tuple)) or len(center) != 2 or radius is None:
            if not isinstance(center, (list, tuple)) or len(center) != 2:
                errors.append(f"{where}.center: expected [x, y]")
            return None
        return CircleCutout(center=(float(center[0]), float(center[1])), radius=radius)
    if kind == "ellipse":
        _check_keys(block, {"type", "center", "semi_axes", "angle_deg"}, where, errors)
        center = block.get("center")
        axes = block.get("semi_axes")
        angle = _get_number(block, "angle_deg", where, errors, default=0.0)
        ok = (isinstance(center, (list, tuple)) and len(center) == 2
              and isinstance(axes, (list, tuple)) and len(axes) == 2
              and angle is not None)
        if not ok:
            errors.append(f"{where}: ellipse needs center [x, y] and semi_axes [d, e]")
            return None
        try:
            return EllipseCutout(center=(float(center[0]), float(center[1])),
                                 d=float(axes[0]), e=float(axes[1]),
                                 angle=math.radians(angle))
        except ValueError as exc:
            errors.append(f"{where}: {exc}")
            return None
    errors.append(f"{where}: unknown defect type {kind!r} "
                  "(expected crack, circle or ellipse)")
    return None


def validate_config(raw: Any) -> RunConfig:
    """Build a RunConfig from parsed JSON, collecting every violation."""
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["top level: expected a JSON object"])

    allowed = {"schema_version", "plate", "material", "mesh", "defects",
               "boundary", "load", "sweep", "output"}
    _check_keys(raw, allowed, "top level", errors)

    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        errors.append(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    plate = None
    pblock = raw.get("plate")
    if not isinstance(pblock, dict):
        errors.append("plate: missing or not an object")
    else:
        _check_keys(pblock, {"a", "b", "h"}, "plate", errors)
        a = _get_number(pblock, "a", "plate", errors, positive=True)
        b = _get_number(pblock, "b", "plate", errors, positive=True)
        h = _get_number(pblock, "h", "plate", errors, positive=True)
        if None not in (a, b, h):
            plate = PlateGeometry(a=a, b=b, h=h)

    material = None
    mblock = raw.get("material")
    if not isinstance(mblock, dict):
        errors.append("material: missing or not an object")
    else:
        _check_keys(mblock, {"pair", "ceramic", "metal", "gradient_index",
                             "shear_correction"}, "material", errors)
        ceramic = metal = None
        if "pair" in mblock:
            name = mblock["pair"]
            if name in BUILTIN_PAIRS:
                ceramic, metal = material_pair(name)
            else:
                errors.append(f"material.pair: unknown pair {name!r}; "
                              f"available: {sorted(BUILTIN_PAIRS)}")
        if "ceramic" in mblock:
            ceramic = _parse_phase(mblock["ceramic"], "material.ceramic", errors)
        if "metal" in mblock:
            metal = _parse_phase(mblock["metal"], "material.metal", errors)
        if ceramic is None or metal is None:
            if "pair" not in mblock and ("ceramic" not in mblock or "metal" not in mblock):
                errors.append("material: give either 'pair' or both 'ceramic' and 'metal'")
        n = _get_number(mblock, "gradient_index", "material", errors, default=0.0)
        if n is not None and n < 0:
            errors.append(f"material.gradient_index: must be >= 0, got {n}")
            n = None
        kappa = _get_number(mblock, "shear_correction", "material", errors,
                            default=5.0 / 6.0, positive=True)
        if ceramic is not None and metal is not None and n is not None and kappa is not None:
            material = MaterialConfig(ceramic=ceramic, metal=metal,
                                      gradient_index=n, shear_correction=kappa)

    mesh = MeshConfig()
    meshblock = raw.get("mesh")
    if meshblock is not None:
        if not isinstance(meshblock, dict):
            errors.append("mesh: expected an object")
        else:
            _check_keys(meshblock, {"nx", "ny"}, "mesh", errors)
            nx = meshblock.get("nx", 40)
            ny = meshblock.get("ny", 40)
            if not (isinstance(nx, int) and isinstance(ny, int)) or nx < 1 or ny < 1:
                errors.append("mesh: nx and ny must be integers >= 1")
            else:
                mesh = MeshConfig(nx=nx, ny=ny)

    defect_list = []
    dblock = raw.get("defects", [])
    if not isinstance(dblock, list):
        errors.append("defects: expected a list")
    else:
        for i, item in enumerate(dblock):
            parsed = _parse_defect(item, i, errors)
            if parsed is not None:
                defect_list.append(parsed)
    defects = DefectSet(
        cracks=tuple(d for d in defect_list if isinstance(d, CrackSpec)),
        cutouts=tuple(d for d in defect_list if not isinstance(d, CrackSpec)))

    boundary = raw.get("boundary", "SSSS")
    if boundary not in ("SSSS", "CCCC"):
        errors.append(f"boundary: expected SSSS or CCCC, got {boundary!r}")

    load = LoadConfig()
    lblock = raw.get("load")
    if lblock is not None:
        if not isinstance(lblock, dict):
            errors.append("load: expected an object")
        else:
            _check_keys(lblock, {"kind", "profile", "metal_surface_rise",
                                 "reference_temp", "strict_reference"}, "load", errors)
            kind = lblock.get("kind", "uniaxial")
            if kind not in ("uniaxial", "biaxial", "thermal"):
                errors.append(f"load.kind: expected uniaxial, biaxial or thermal, got {kind!r}")
                kind = "uniaxial"
            profile = lblock.get("profile", "nonlinear")
            if profile not in ("linear", "nonlinear"):
                errors.append(f"load.profile: expected linear or nonlinear, got {profile!r}")
                profile = "nonlinear"
            rise = _get_number(lblock, "metal_surface_rise", "load", errors, default=5.0)
            ref = _get_number(lblock, "reference_temp", "load", errors, default=0.0)
            strict = lblock.get("strict_reference", False)
            if not isinstance(strict, bool):
                errors.append("load.strict_reference: expected true/false")
                strict = False
            if rise is not None and ref is not None:
                load = LoadConfig(kind=kind, profile=profile, metal_surface_rise=rise,
                                  reference_temp=ref, strict_reference=strict)

    sweep_cfg = None
    sblock = raw.get("sweep")
    if sblock is not None:
        if not isinstance(sblock, dict):
            errors.append("sweep: expected an object")
        else:
            _check_keys(sblock, {"grid"}, "sweep", errors)
            grid = sblock.get("grid")
            if not isinstance(grid, dict) or not grid:
                errors.append("sweep.grid: expected a non-empty object of "
                              "parameter -> list of values")
            else:
                parsed_grid = {}
                for name, values in grid.items():
                    if name not in SWEEPABLE:
                        errors.append(f"sweep.grid: unknown parameter {name!r}; "
                                      f"sweepable: {SWEEPABLE}")
                        continue
                    if not isinstance(values, list) or not values:
                        errors.append(f"sweep.grid.{name}: expected a non-empty list")
                        continue
                    parsed_grid[name] = tuple(float(v) for v in values)
                if parsed_grid:
                    sweep_cfg = SweepConfig(grid=parsed_grid)

    output = OutputConfig()
    oblock = raw.get("output")
    if oblock is not None:
        if not isinstance(oblock, dict):
            errors.append("output: expected an object")
        else:
            _check_keys(oblock, {"directory", "csv", "mode_shape"}, "output", errors)
            directory = oblock.get("directory", ".")
            csv = oblock.get("csv", "results.csv")
            mode_shape = oblock.get("mode_shape", False)
            if not isinstance(mode_shape, bool):
                errors.append("output.mode_shape: expected true/false")
                mode_shape = False
            output = OutputConfig(directory=str(directory), csv=str(csv),
                                  mode_shape=mode_shape)

    if plate is not None:
        errors.extend(validate_defects(plate, defects))

    if errors or plate is None or material is None:
        if not errors:
            errors.append("configuration incomplete")
        raise ConfigError(errors)
    return RunConfig(plate=plate, material=material, mesh=mesh, defects=defects,
                     boundary=boundary, load=load, sweep=sweep_cfg, output=output)


def parse_config(path: str | Path) -> RunConfig:
    """Load and validate a JSON configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"configuration file not found: {path}"])
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([f"malformed JSON: {exc}"]) from exc
    return validate_config(raw)


def _phase_to_dict(p: PhaseProperties) -> dict[str, float]:
    return {"youngs_modulus": p.youngs_modulus, "poisson_ratio": p.poisson_ratio,
            "thermal_expansion": p.thermal_expansion, "conductivity": p.conductivity,
            "density": p.density}


def _defect_to_dict(d) -> dict[str, Any]:
    if isinstance(d, CrackSpec):
        return {"type": "crack", "center": list(d.center), "length": d.length,
                "angle_deg": math.degrees(d.angle)}
    if isinstance(d, CircleCutout):
        return {"type": "circle", "center": list(d.center), "radius": d.radius}
    return {"type": "ellipse", "center": list(d.center),
            "semi_axes": [d.d, d.e], "angle_deg": math.degrees(d.angle)}


def config_to_dict(config: RunConfig) -> dict[str, Any]:
    """Canonical JSON-compatible echo; feeding it back to validate_config
    reproduces an equivalent configuration."""
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "plate": {"a": config.plate.a, "b": config.plate.b, "h": config.plate.h},
        "material": {
            "ceramic": _phase_to_dict(config.material.ceramic),
            "metal": _phase_to_dict(config.material.metal),
            "gradient_index": config.material.gradient_index,
            "shear_correction": config.material.shear_correction,
        },
        "mesh": {"nx": config.mesh.nx, "ny": config.mesh.ny},
        "defects": [_defect_to_dict(d) for d in
                    (*config.defects.cracks, *config.defects.cutouts)],
        "boundary": config.boundary,
        "load": {"kind": config.load.kind, "profile": config.load.profile,
                 "metal_surface_rise": config.load.metal_surface_rise,
                 "reference_temp": config.load.reference_temp,
                 "strict_reference": config.load.strict_reference},
        "output": {"directory": config.output.directory, "csv": config.output.csv,
                   "mode_shape": config.output.mode_shape},
    }
    if config.sweep is not None:
        out["sweep"] = {"grid": {k: list(v) for k, v in config.sweep.grid.items()}}
    return out


def sweep_points(sweep: SweepConfig) -> list[dict[str, float]]:
    """Cartesian grid in parameter insertion order."""
    names = list(sweep.grid)
    return [dict(zip(names, combo)) for combo in product(*(sweep.grid[n] for n in names))]


def apply_sweep_point(config: RunConfig, point: dict[str, float]) -> RunConfig:
    """Patch one grid point into the configuration.

    Ratios are relative to the plate length a; defect_count keeps the first
    k defects of the configured list (cracks first, then cutouts).
    """
    plate = config.plate
    material = config.material
    cracks = list(config.defects.cracks)
    cutouts = list(config.defects.cutouts)

    for name, value in point.items():
        if name == "gradient_index":
            material = replace(material, gradient_index=value)
        elif name == "aspect_ratio":
            plate = replace(plate, a=value * plate.b)
        elif name == "side_to_thickness":
            plate = replace(plate, h=plate.a / value)
        elif name == "crack_length_ratio":
            if value == 0.0:
                cracks = []
            else:
                cracks = [replace(c, length=value * plate.a) for c in cracks]
        elif name == "crack_angle_deg":
            cracks = [replace(c, angle=math.radians(value)) for c in cracks]
        elif name == "cutout_radius_ratio":
            cutouts = [replace(c, radius=value * plate.a)
                       if isinstance(c, CircleCutout) else c for c in cutouts]
        elif name == "defect_count":
            count = int(value)
            ordered = cracks + cutouts
            if count < 0 or count > len(ordered):
                raise ValueError(f"defect_count {count} outside 0..{len(ordered)}")
            kept = ordered[:count]
            cracks = [d for d in kept if isinstance(d, CrackSpec)]
            cutouts = [d for d in kept if not isinstance(d, CrackSpec)]
        else:
            raise ValueError(f"unknown sweep parameter {name!r}")

    defects = DefectSet(cracks=tuple(cracks), cutouts=tuple(cutouts))
    errors = validate_defects(plate, defects)
    if errors:
        raise ConfigError(errors)
    return replace(config, plate=plate, material=material, defects=defects)
