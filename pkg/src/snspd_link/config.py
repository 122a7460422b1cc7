"""Strict JSON run configuration.

Lengths are accepted either as plain numbers (meters) or strings with a
unit suffix ("220 nm", "1.57 um", "0.04 mm"); everything is normalized
to meters. Unknown keys anywhere in a config are rejected. Defaults are
limited to documented physics constants (taper-tip transmissions) and
numerical controls (grid, padding, slice counts), all of which are
echoed back in the resolved configuration that reports embed.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .calibration import LossBudget
from .errors import ConfigError
from .geometry import (
    ConverterGeometry,
    HairpinNanowire,
    SpacerLayer,
    StripWaveguide,
    TaperedWaveguide,
)
from .materials import Material, builtin_materials
from .propagation import TipTransmissions

_LENGTH_UNITS = {
    "m": 1.0,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "nm": 1e-9,
    "pm": 1e-12,
}


def parse_length(value, where: str = "length") -> float:
    """Meters from a number or a '<value> <unit>' string."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a length, got a boolean")
    if isinstance(value, (int, float)):
        result = float(value)
    elif isinstance(value, str):
        parts = value.split()
        if len(parts) != 2:
            raise ConfigError(
                f"{where}: length strings must look like '220 nm', got {value!r}")
        number, unit = parts
        if unit not in _LENGTH_UNITS:
            raise ConfigError(f"{where}: unknown length unit {unit!r}")
        try:
            result = float(number) * _LENGTH_UNITS[unit]
        except ValueError:
            raise ConfigError(f"{where}: bad number in {value!r}") from None
    else:
        raise ConfigError(f"{where}: expected a length, got {type(value).__name__}")
    if not math.isfinite(result):
        raise ConfigError(f"{where}: length must be finite")
    return result


def _require_keys(d: dict, allowed: set[str], required: set[str],
                  where: str) -> None:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(d)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


def _number(d: dict, key: str, where: str, minimum: float | None = None,
            default=None):
    if key not in d:
        if default is not None:
            return default
        raise ConfigError(f"{where}: missing key {key!r}")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number")
    v = float(v)
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}.{key}: must be >= {minimum}")
    return v


def load_config(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        with path.open() as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg


def build_materials(cfg: dict, where: str = "materials") -> dict[str, Material]:
    """Material set from config; entries are tables or builtin references."""
    if not isinstance(cfg, dict) or not cfg:
        raise ConfigError(f"{where}: expected a non-empty object")
    builtins = builtin_materials()
    out: dict[str, Material] = {}
    for name, entry in cfg.items():
        here = f"{where}.{name}"
        _require_keys(entry, {"table", "builtin"}, set(), here)
        if ("table" in entry) == ("builtin" in entry):
            raise ConfigError(f"{here}: give exactly one of 'table' or 'builtin'")
        if "builtin" in entry:
            ref = entry["builtin"]
            if ref not in builtins:
                raise ConfigError(
                    f"{here}: unknown builtin {ref!r}; have {sorted(builtins)}")
            out[name] = builtins[ref]
            continue
        rows = entry["table"]
        if not isinstance(rows, list) or not rows:
            raise ConfigError(f"{here}.table: expected a non-empty list")
        parsed = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != 3:
                raise ConfigError(f"{here}.table[{i}]: expected [wavelength, n, k]")
            wl = parse_length(row[0], f"{here}.table[{i}][0]")
            parsed.append((wl, row[1], row[2]))
        try:
            out[name] = Material(name, tuple(parsed))
        except ValueError as exc:
            raise ConfigError(f"{here}: {exc}") from None
    return out


def _material_ref(name, materials: dict[str, Material], where: str) -> Material:
    if not isinstance(name, str) or name not in materials:
        raise ConfigError(f"{where}: unknown material {name!r}")
    return materials[name]


def build_geometry(cfg: dict, materials: dict[str, Material],
                   where: str = "geometry") -> ConverterGeometry:
    _require_keys(cfg, {"pic_waveguide", "det_waveguide", "nanowire",
                        "gap_layer", "cladding_above", "cladding_below",
                        "z1", "z2", "dz2", "rotation_offset_deg", "pivot_z",
                        "grid", "padding"},
                  {"pic_waveguide", "det_waveguide", "nanowire", "gap_layer",
                   "cladding_above", "cladding_below", "z1", "z2", "dz2"},
                  where)
    pic_cfg = cfg["pic_waveguide"]
    _require_keys(pic_cfg, {"thickness", "width_start", "width_end",
                            "taper_length", "material"},
                  {"thickness", "width_start", "width_end", "taper_length",
                   "material"}, f"{where}.pic_waveguide")
    det_cfg = cfg["det_waveguide"]
    _require_keys(det_cfg, {"thickness", "width", "material"},
                  {"thickness", "width", "material"}, f"{where}.det_waveguide")
    wire_cfg = cfg["nanowire"]
    _require_keys(wire_cfg, {"thickness", "wire_width", "gap", "material"},
                  {"thickness", "wire_width", "gap", "material"},
                  f"{where}.nanowire")
    gap_cfg = cfg["gap_layer"]
    _require_keys(gap_cfg, {"thickness", "material"},
                  {"thickness", "material"}, f"{where}.gap_layer")

    kwargs = dict(
        pic=TaperedWaveguide(
            parse_length(pic_cfg["thickness"], f"{where}.pic_waveguide.thickness"),
            parse_length(pic_cfg["width_start"],
                         f"{where}.pic_waveguide.width_start"),
            parse_length(pic_cfg["width_end"], f"{where}.pic_waveguide.width_end"),
            parse_length(pic_cfg["taper_length"],
                         f"{where}.pic_waveguide.taper_length"),
            _material_ref(pic_cfg["material"], materials,
                          f"{where}.pic_waveguide.material")),
        detector=StripWaveguide(
            parse_length(det_cfg["thickness"], f"{where}.det_waveguide.thickness"),
            parse_length(det_cfg["width"], f"{where}.det_waveguide.width"),
            _material_ref(det_cfg["material"], materials,
                          f"{where}.det_waveguide.material")),
        nanowire=HairpinNanowire(
            parse_length(wire_cfg["thickness"], f"{where}.nanowire.thickness"),
            parse_length(wire_cfg["wire_width"], f"{where}.nanowire.wire_width"),
            parse_length(wire_cfg["gap"], f"{where}.nanowire.gap"),
            _material_ref(wire_cfg["material"], materials,
                          f"{where}.nanowire.material")),
        gap_layer=SpacerLayer(
            parse_length(gap_cfg["thickness"], f"{where}.gap_layer.thickness"),
            _material_ref(gap_cfg["material"], materials,
                          f"{where}.gap_layer.material")),
        cladding_above=_material_ref(cfg["cladding_above"], materials,
                                     f"{where}.cladding_above"),
        cladding_below=_material_ref(cfg["cladding_below"], materials,
                                     f"{where}.cladding_below"),
        z1=parse_length(cfg["z1"], f"{where}.z1"),
        z2=parse_length(cfg["z2"], f"{where}.z2"),
        dz2=parse_length(cfg["dz2"], f"{where}.dz2"),
    )
    if "rotation_offset_deg" in cfg:
        kwargs["rotation_offset_deg"] = _number(cfg, "rotation_offset_deg", where)
    if "pivot_z" in cfg:
        kwargs["pivot_z"] = parse_length(cfg["pivot_z"], f"{where}.pivot_z")
    if "grid" in cfg:
        _require_keys(cfg["grid"], {"dx", "dy"}, {"dx", "dy"}, f"{where}.grid")
        kwargs["grid_dx"] = parse_length(cfg["grid"]["dx"], f"{where}.grid.dx")
        kwargs["grid_dy"] = parse_length(cfg["grid"]["dy"], f"{where}.grid.dy")
    if "padding" in cfg:
        kwargs["padding"] = parse_length(cfg["padding"], f"{where}.padding")
    try:
        return ConverterGeometry(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def build_budget(cfg: dict, where: str = "budget") -> LossBudget:
    _require_keys(cfg, {"p_in_w", "wavelength", "db_fiber", "db_coupler",
                        "db_attenuator", "db_fiber_sigma", "db_extra",
                        "extra_sigmas"},
                  {"p_in_w", "wavelength", "db_fiber", "db_coupler",
                   "db_attenuator"}, where)
    extra = cfg.get("extra_sigmas", [])
    if not isinstance(extra, list):
        raise ConfigError(f"{where}.extra_sigmas: expected a list")
    try:
        return LossBudget(
            p_in=_number(cfg, "p_in_w", where, minimum=0.0),
            wavelength=parse_length(cfg["wavelength"], f"{where}.wavelength"),
            db_fiber=_number(cfg, "db_fiber", where, minimum=0.0),
            db_coupler=_number(cfg, "db_coupler", where, minimum=0.0),
            db_attenuator=_number(cfg, "db_attenuator", where, minimum=0.0),
            db_fiber_sigma=_number(cfg, "db_fiber_sigma", where, minimum=0.0,
                                   default=0.0),
            db_extra=_number(cfg, "db_extra", where, minimum=0.0, default=0.0),
            extra_sigmas=tuple(float(s) for s in extra),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def build_tips(cfg: dict | None, where: str = "tips") -> TipTransmissions:
    if cfg is None:
        return TipTransmissions()
    _require_keys(cfg, {"t_det_sq", "t_pic_sq"}, {"t_det_sq", "t_pic_sq"}, where)
    try:
        return TipTransmissions(_number(cfg, "t_det_sq", where),
                                _number(cfg, "t_pic_sq", where))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def echo_geometry(geom: ConverterGeometry) -> dict:
    """Resolved geometry in SI units for report audit trails."""
    return {
        "pic_waveguide": {
            "thickness_m": geom.pic.thickness,
            "width_start_m": geom.pic.width_start,
            "width_end_m": geom.pic.width_end,
            "taper_length_m": geom.pic.taper_length,
            "material": geom.pic.material.name,
        },
        "det_waveguide": {
            "thickness_m": geom.detector.thickness,
            "width_m": geom.detector.width,
            "material": geom.detector.material.name,
        },
        "nanowire": {
            "thickness_m": geom.nanowire.thickness,
            "wire_width_m": geom.nanowire.wire_width,
            "gap_m": geom.nanowire.gap,
            "material": geom.nanowire.material.name,
        },
        "gap_layer": {
            "thickness_m": geom.gap_layer.thickness,
            "material": geom.gap_layer.material.name,
        },
        "cladding_above": geom.cladding_above.name,
        "cladding_below": geom.cladding_below.name,
        "z1_m": geom.z1,
        "z2_m": geom.z2,
        "dz2_m": geom.dz2,
        "rotation_offset_deg": geom.rotation_offset_deg,
        "pivot_z_m": geom.rotation_pivot,
        "grid": {"dx_m": geom.grid_dx, "dy_m": geom.grid_dy},
        "padding_m": geom.padding,
    }


def echo_materials(materials: dict[str, Material]) -> dict:
    return {name: {"table": [[w, n, k] for w, n, k in m.dispersion]}
            for name, m in sorted(materials.items())}


def echo_budget(budget: LossBudget) -> dict:
    return {
        "p_in_w": budget.p_in,
        "wavelength_m": budget.wavelength,
        "db_fiber": budget.db_fiber,
        "db_coupler": budget.db_coupler,
        "db_attenuator": budget.db_attenuator,
        "db_fiber_sigma": budget.db_fiber_sigma,
        "db_extra": budget.db_extra,
        "extra_sigmas": list(budget.extra_sigmas),
        "total_db": budget.total_db,
    }
