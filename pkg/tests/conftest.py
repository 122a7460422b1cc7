import json

import numpy as np
import pytest

from snspd_link import (
    CrossSection,
    Rect,
    TipTransmissions,
    build_absorption_profile,
    constant_material,
    converged_detection_efficiency,
    detection_efficiency,
    silicon_hybrid_defaults,
    solve_modes,
)

import oracles

SLAB = dict(n_core=2.0, n_clad=1.444, thickness=250e-9, wavelength=1.57e-6)

# Invariant-direction setup for the slab benchmark: 10 coarse rows over a
# tall window keep the box penalty on n_eff below 2e-6 while the solver
# resolves the whole 10-member harmonic cluster (n_modes=12).
SLAB_HEIGHT = 320e-6
SLAB_ROWS = 10
SLAB_PAD = 2.0e-6
SLAB_MODES = 12


def slab_cross_section(dx, core_k=0.0, pad=SLAB_PAD):
    d = SLAB["thickness"]
    clad = constant_material("clad", SLAB["n_clad"])
    core = constant_material("core", SLAB["n_core"], core_k)
    half = d / 2 + pad
    return CrossSection(-half, half, 0.0, SLAB_HEIGHT, dx,
                        SLAB_HEIGHT / SLAB_ROWS, clad,
                        (Rect(-d / 2, d / 2, 0.0, SLAB_HEIGHT, core),))


@pytest.fixture(scope="session")
def slab_oracle():
    return dict(
        neff=oracles.slab_te_neff(SLAB["n_core"], SLAB["n_clad"],
                                  SLAB["thickness"], SLAB["wavelength"]),
        confinement=oracles.slab_te_confinement(
            SLAB["n_core"], SLAB["n_clad"], SLAB["thickness"],
            SLAB["wavelength"]),
    )


@pytest.fixture(scope="session")
def slab_solutions():
    out = {}
    for dx in (10e-9, 5e-9, 2.5e-9):
        cs = slab_cross_section(dx)
        out[dx] = solve_modes(cs, SLAB["wavelength"], SLAB_MODES)[0]
    return out


@pytest.fixture(scope="session")
def absorbing_slab_solution():
    cs = slab_cross_section(10e-9, core_k=1e-4)
    return solve_modes(cs, SLAB["wavelength"], SLAB_MODES)[0], cs


@pytest.fixture(scope="session")
def hybrid_results():
    """Converged default-device run plus overlap-length variants."""
    wavelength = 1.57e-6
    converged = converged_detection_efficiency(
        silicon_hybrid_defaults(), wavelength, tol=1e-3)
    tips = TipTransmissions()
    by_overlap = {}
    for dz2 in (20e-6, 50e-6, 250e-6):
        geom = silicon_hybrid_defaults(dz2=dz2)
        n = int(round(geom.hairpin_length / 2.5e-6)) + 1
        profile = build_absorption_profile(geom, wavelength, n)
        by_overlap[dz2] = dict(
            geom=geom,
            profile=profile,
            efficiency=detection_efficiency(profile, geom.z1, geom.z2, tips),
        )
    return dict(wavelength=wavelength, converged=converged, tips=tips,
                by_overlap=by_overlap)


def mini_geometry(**overrides):
    """Small, coarse converter for fast pipeline and CLI tests."""
    from snspd_link import TaperedWaveguide
    from snspd_link.materials import builtin_materials

    mats = builtin_materials()
    fields = dict(
        pic=TaperedWaveguide(220e-9, 400e-9, 200e-9, 8e-6, mats["silicon"]),
        z1=2e-6, z2=10e-6, dz2=6e-6,
        grid_dx=40e-9, grid_dy=20e-9,
    )
    fields.update(overrides)
    return silicon_hybrid_defaults(**fields)


MINI_GEOMETRY_JSON = {
    "pic_waveguide": {"thickness": "220 nm", "width_start": "400 nm",
                      "width_end": "200 nm", "taper_length": "8 um",
                      "material": "si"},
    "det_waveguide": {"thickness": "250 nm", "width": "1 um",
                      "material": "sin"},
    "nanowire": {"thickness": "9 nm", "wire_width": "90 nm", "gap": "120 nm",
                 "material": "nbtin"},
    "gap_layer": {"thickness": 0.0, "material": "air"},
    "cladding_above": "air",
    "cladding_below": "oxide",
    "z1": "2 um", "z2": "10 um", "dz2": "6 um",
    "grid": {"dx": "40 nm", "dy": "20 nm"},
}

MINI_MATERIALS_JSON = {
    "si": {"builtin": "silicon"},
    "sin": {"builtin": "silicon_nitride"},
    "oxide": {"builtin": "silica"},
    "nbtin": {"builtin": "nbtin"},
    "air": {"builtin": "vacuum"},
}


def write_config(path, payload):
    path.write_text(json.dumps(payload, indent=2))
    return str(path)


def synthetic_plateau_trace(seed=7):
    """Saturating count trace with counter-granular rates."""
    from scipy.special import erf

    from snspd_link import CountTrace

    biases = np.linspace(4e-6, 8e-6, 41)
    rates = 1.2e6 * (1 + erf((biases - 5.5e-6) / 0.6e-6)) / 2
    rates = np.round(rates * 0.1) / 0.1  # 10 Hz granularity at 100 ms
    darks = np.zeros_like(rates)
    darks[-5:] = 40.0
    return CountTrace(0.1, tuple(zip(biases, rates, darks)))
