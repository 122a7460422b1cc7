"""Waveguide-coupled SNSPD toolkit.

Simulation side: materials and converter geometry, a finite-difference
eigenmode solver with complex permittivity, and the taper-sliced
absorption integral that predicts on-chip detection efficiency.
Measurement side: off-chip loss-budget calibration, photon flux, and
extraction of detector figures of merit from raw bench traces.
"""

from .analysis import (
    CountTrace,
    EfficiencyReport,
    ExtinctionRatio,
    IVTrace,
    JitterHistogram,
    dark_count_rate,
    detect_plateau,
    extinction_ratio,
    extract_efficiency,
    jitter_fwhm,
    linearity_fit,
    switching_current,
)
from .calibration import (
    LossBudget,
    PhotonFlux,
    chain_db,
    facet_loss_from_loopback,
    photon_energy,
    photon_flux,
)
from .geometry import (
    ConverterGeometry,
    CrossSection,
    HairpinNanowire,
    Rect,
    SpacerLayer,
    StripWaveguide,
    TaperedWaveguide,
    silicon_hybrid_defaults,
)
from .materials import Material, builtin_materials, constant_material
from .modes import (
    ModeSolution,
    absorbed_fraction_by_region,
    modal_absorption,
    solve_modes,
)
from .propagation import (
    AbsorptionProfile,
    ConvergedEfficiency,
    TipTransmissions,
    build_absorption_profile,
    clear_solve_cache,
    converged_detection_efficiency,
    detection_efficiency,
    normalize_rotation_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorptionProfile",
    "ConvergedEfficiency",
    "ConverterGeometry",
    "CountTrace",
    "CrossSection",
    "EfficiencyReport",
    "ExtinctionRatio",
    "HairpinNanowire",
    "IVTrace",
    "JitterHistogram",
    "LossBudget",
    "Material",
    "ModeSolution",
    "PhotonFlux",
    "Rect",
    "SpacerLayer",
    "StripWaveguide",
    "TaperedWaveguide",
    "TipTransmissions",
    "absorbed_fraction_by_region",
    "build_absorption_profile",
    "builtin_materials",
    "chain_db",
    "clear_solve_cache",
    "constant_material",
    "converged_detection_efficiency",
    "dark_count_rate",
    "detect_plateau",
    "detection_efficiency",
    "extinction_ratio",
    "extract_efficiency",
    "facet_loss_from_loopback",
    "jitter_fwhm",
    "linearity_fit",
    "modal_absorption",
    "normalize_rotation_sweep",
    "photon_energy",
    "photon_flux",
    "silicon_hybrid_defaults",
    "solve_modes",
    "switching_current",
]
