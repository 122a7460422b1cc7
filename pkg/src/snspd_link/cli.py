"""Command line front end.

Commands::

    snspd-link simulate-ode       --config cfg.json --out DIR [--slices N]
                                  [--tol X] [--threads N]
    snspd-link rotation-normalize --config cfg.json --out DIR
    snspd-link extract-ode        --config cfg.json --out DIR
    snspd-link analyze            --config cfg.json --out DIR

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 data-contract violation. Reports embed the fully resolved
configuration, outputs are written atomically, and identical inputs
produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import config as cfgmod
from . import io as iomod
from .analysis import (
    dark_count_rate,
    extinction_ratio,
    extract_efficiency,
    jitter_fwhm,
    linearity_fit,
    switching_current,
)
from .calibration import photon_flux
from .errors import (
    ConfigError,
    DataContractError,
    NumericalError,
    SnspdLinkError,
)
from .propagation import (
    build_absorption_profile,
    converged_detection_efficiency,
    detection_efficiency,
    normalize_rotation_sweep,
)

THREADS_ENV = "SNSPD_LINK_THREADS"

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_DATA = 4


def _resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV}={env!r} is not an integer") from None
    return 1


def _simulate(args) -> int:
    cfg = cfgmod.load_config(args.config)
    cfgmod._require_keys(cfg, {"materials", "geometry", "wavelength", "tips",
                               "slices", "tolerance"},
                         {"materials", "geometry", "wavelength"}, "config")
    materials = cfgmod.build_materials(cfg["materials"])
    geom = cfgmod.build_geometry(cfg["geometry"], materials)
    wavelength = cfgmod.parse_length(cfg["wavelength"], "config.wavelength")
    tips = cfgmod.build_tips(cfg.get("tips"))
    threads = _resolve_threads(args.threads)
    tol = args.tol if args.tol is not None else cfg.get("tolerance", 1e-3)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol <= 0:
        raise ConfigError("tolerance must be a positive number")
    tol = float(tol)
    slices = args.slices if args.slices is not None else cfg.get("slices")

    if slices is not None:
        if isinstance(slices, bool) or not isinstance(slices, int) or slices < 2:
            raise ConfigError("slices must be an integer >= 2")
        profile = build_absorption_profile(geom, wavelength, slices,
                                           threads=threads)
        eff = detection_efficiency(profile, geom.z1, geom.z2, tips)
        n_used = slices
    else:
        eff, n_used, profile = converged_detection_efficiency(
            geom, wavelength, tol, tips=tips, threads=threads)

    out = Path(args.out)
    iomod.write_profile_csv(profile, out / "absorption_profile.csv")
    report = {
        "command": "simulate-ode",
        "config": {
            "materials": cfgmod.echo_materials(materials),
            "geometry": cfgmod.echo_geometry(geom),
            "wavelength_m": wavelength,
            "tips": {"t_det_sq": tips.t_det_sq, "t_pic_sq": tips.t_pic_sq},
            "slices": slices,
            "tolerance": tol,
            "threads": threads,
        },
        "results": {
            "efficiency": eff,
            "n_slices": n_used,
            "convergence_estimate": profile.convergence_estimate,
            "survival_end": float(profile.survival[-1]),
        },
    }
    iomod.write_json(report, out / "report.json")
    print(f"on-chip detection efficiency: {eff:.6g}")
    print(f"slices: {n_used}")
    print(f"convergence estimate: {profile.convergence_estimate:.3e}")
    return 0


def _rotation(args) -> int:
    cfg = cfgmod.load_config(args.config)
    cfgmod._require_keys(cfg, {"sweep_csv", "aligned_efficiency"},
                         {"sweep_csv", "aligned_efficiency"}, "config")
    aligned = cfg["aligned_efficiency"]
    if not isinstance(aligned, (int, float)) or isinstance(aligned, bool) \
            or not 0 < aligned <= 1:
        raise ConfigError("aligned_efficiency must be a number in (0, 1]")
    sweep = iomod.read_rotation_sweep(_relative_to_config(args, cfg["sweep_csv"]))
    normalized = sorted(normalize_rotation_sweep(sweep, float(aligned)))
    out = Path(args.out)
    iomod.write_rotation_csv(normalized, out / "rotation_efficiency.csv")
    report = {
        "command": "rotation-normalize",
        "config": {"sweep_csv": str(cfg["sweep_csv"]),
                   "aligned_efficiency": float(aligned)},
        "results": {"rows": [[a, e] for a, e in normalized]},
    }
    iomod.write_json(report, out / "report.json")
    print(f"aligned efficiency: {aligned:.6g}")
    for angle, eff in normalized:
        print(f"{angle:g} deg -> {eff:.6g}")
    return 0


def _extract(args) -> int:
    cfg = cfgmod.load_config(args.config)
    cfgmod._require_keys(cfg, {"trace_csv", "integration_time_s", "bias_a",
                               "budget"},
                         {"trace_csv", "integration_time_s", "bias_a",
                          "budget"}, "config")
    integration = cfgmod._number(cfg, "integration_time_s", "config",
                                 minimum=0.0)
    bias = cfgmod._number(cfg, "bias_a", "config")
    budget = cfgmod.build_budget(cfg["budget"], "config.budget")
    trace = iomod.read_count_trace(_relative_to_config(args, cfg["trace_csv"]),
                                   integration)
    flux = photon_flux(budget)
    report_obj = extract_efficiency(trace, bias, flux,
                                    wavelength=budget.wavelength)
    out = Path(args.out)
    report = {
        "command": "extract-ode",
        "config": {
            "trace_csv": str(cfg["trace_csv"]),
            "integration_time_s": integration,
            "bias_a": bias,
            "budget": cfgmod.echo_budget(budget),
        },
        "report": {
            "ode": report_obj.ode,
            "ode_sigma": report_obj.ode_sigma,
            "bias_a": report_obj.bias,
            "wavelength_m": report_obj.wavelength,
            "dark_hz": report_obj.dark_rate,
            "flux_hz": flux.rate,
            "flux_sigma_hz": flux.sigma,
            "inputs": report_obj.inputs,
        },
    }
    iomod.write_json(report, out / "report.json")
    print(report_obj.summary())
    return 0


def _analyze(args) -> int:
    cfg = cfgmod.load_config(args.config)
    cfgmod._require_keys(cfg, {"iv", "jitter", "linearity", "extinction",
                               "dark"},
                         set(), "config")
    if not cfg:
        raise ConfigError("analyze config needs at least one section "
                          "(iv, jitter, linearity, extinction, dark)")
    sections: dict[str, dict] = {}
    failures: list[SnspdLinkError] = []

    def run(name, fn):
        try:
            sections[name] = fn()
        except SnspdLinkError as exc:
            sections[name] = {"error": {"category": _category(exc),
                                        "message": str(exc)}}
            failures.append(exc)

    if "iv" in cfg:
        def iv_section():
            c = cfg["iv"]
            cfgmod._require_keys(c, {"csv", "v_threshold_v"}, {"csv"},
                                 "config.iv")
            iv = iomod.read_iv_trace(_relative_to_config(args, c["csv"]))
            thr = cfgmod._number(c, "v_threshold_v", "config.iv", minimum=0.0,
                                 default=50e-6)
            return {"switching_current_a": switching_current(iv, thr),
                    "v_threshold_v": thr}
        run("iv", iv_section)
    if "jitter" in cfg:
        def jitter_section():
            c = cfg["jitter"]
            cfgmod._require_keys(c, {"csv"}, {"csv"}, "config.jitter")
            hist = iomod.read_jitter_histogram(
                _relative_to_config(args, c["csv"]))
            return {"fwhm_s": jitter_fwhm(hist), "bin_width_s": hist.bin_width}
        run("jitter", jitter_section)
    if "linearity" in cfg:
        def linearity_section():
            c = cfg["linearity"]
            cfgmod._require_keys(c, {"csv", "dark_floor_hz"}, {"csv"},
                                 "config.linearity")
            pts = iomod.read_linearity_points(
                _relative_to_config(args, c["csv"]))
            floor = cfgmod._number(c, "dark_floor_hz", "config.linearity",
                                   minimum=0.0, default=0.0)
            slope, r2 = linearity_fit(pts, dark_floor=floor)
            return {"slope_per_decade": slope, "r_squared": r2}
        run("linearity", linearity_section)
    if "extinction" in cfg:
        def extinction_section():
            c = cfg["extinction"]
            cfgmod._require_keys(
                c, {"coupled_hz", "uncoupled_hz", "integration_time_s"},
                {"coupled_hz", "uncoupled_hz"}, "config.extinction")
            t = c.get("integration_time_s")
            if t is not None:
                t = cfgmod._number(c, "integration_time_s", "config.extinction",
                                   minimum=0.0)
            ratio = extinction_ratio(
                cfgmod._number(c, "coupled_hz", "config.extinction"),
                cfgmod._number(c, "uncoupled_hz", "config.extinction",
                               minimum=0.0),
                integration_time=t)
            return {"db": ratio.db, "lower_bound": ratio.lower_bound,
                    "text": str(ratio)}
        run("extinction", extinction_section)
    if "dark" in cfg:
        def dark_section():
            c = cfg["dark"]
            cfgmod._require_keys(c, {"csv", "integration_time_s", "bias_a"},
                                 {"csv", "integration_time_s", "bias_a"},
                                 "config.dark")
            trace = iomod.read_count_trace(
                _relative_to_config(args, c["csv"]),
                cfgmod._number(c, "integration_time_s", "config.dark",
                               minimum=0.0))
            return {"dark_hz": dark_count_rate(
                trace, cfgmod._number(c, "bias_a", "config.dark"))}
        run("dark", dark_section)

    report = {"command": "analyze", "config": cfg, "sections": sections}
    iomod.write_json(report, Path(args.out) / "report.json")
    for name in sorted(sections):
        body = sections[name]
        if "error" in body:
            print(f"{name}: FAILED ({body['error']['message']})")
        else:
            print(f"{name}: " + ", ".join(f"{k}={v}" for k, v in body.items()))
    skipped = {"iv", "jitter", "linearity", "extinction", "dark"} - set(cfg)
    for name in sorted(skipped):
        print(f"{name}: skipped (not configured)")
    if failures:
        return _exit_code(failures[0])
    return 0


def _relative_to_config(args, path: str) -> Path:
    p = Path(path)
    if p.is_absolute():
        return p
    return Path(args.config).parent / p


def _category(exc: SnspdLinkError) -> str:
    if isinstance(exc, ConfigError):
        return "config"
    if isinstance(exc, NumericalError):
        return "numerical"
    if isinstance(exc, DataContractError):
        return "data"
    return "error"


def _exit_code(exc: SnspdLinkError) -> int:
    return {"config": EXIT_CONFIG, "numerical": EXIT_NUMERICAL,
            "data": EXIT_DATA}.get(_category(exc), EXIT_DATA)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snspd-link",
        description="Waveguide-coupled SNSPD simulation and bench analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help=f"per-slice solver threads (default: "
                            f"${THREADS_ENV} or 1)")

    p = sub.add_parser("simulate-ode",
                       help="simulate on-chip detection efficiency")
    common(p)
    p.add_argument("--slices", type=int, default=None,
                   help="fixed slice count (default: auto-converge)")
    p.add_argument("--tol", type=float, default=None,
                   help="convergence tolerance on the efficiency")
    p.set_defaults(fn=_simulate)

    p = sub.add_parser("rotation-normalize",
                       help="normalize an absorbed-energy rotation sweep")
    common(p)
    p.set_defaults(fn=_rotation)

    p = sub.add_parser("extract-ode",
                       help="extract measured efficiency from a count trace")
    common(p)
    p.set_defaults(fn=_extract)

    p = sub.add_parser("analyze", help="detector figures of merit")
    common(p)
    p.set_defaults(fn=_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SnspdLinkError as exc:
        payload = {"error": {"category": _category(exc), "message": str(exc)}}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
