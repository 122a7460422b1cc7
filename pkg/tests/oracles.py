"""Independent analytic oracles used by the tests.

These are deliberately separate from the package implementation: the
slab quantities come from the transcendental dispersion relation of the
symmetric three-layer slab, solved by bracketed root finding.
"""

import math

import numpy as np
from scipy.optimize import brentq


def slab_te_even_root(n_core: float, n_clad: float, thickness: float,
                      wavelength: float) -> float:
    """u = kappa*d/2 of the fundamental even TE slab mode.

    Solves u tan(u) = sqrt(V^2 - u^2) on (0, min(V, pi/2)).
    """
    k0 = 2 * math.pi / wavelength
    v = k0 * (thickness / 2) * math.sqrt(n_core ** 2 - n_clad ** 2)

    def f(u):
        return u * math.tan(u) - math.sqrt(max(v ** 2 - u ** 2, 0.0))

    upper = min(v, math.pi / 2 - 1e-12)
    return brentq(f, 1e-12, upper - 1e-12, xtol=1e-15, rtol=1e-15)


def slab_te_neff(n_core: float, n_clad: float, thickness: float,
                 wavelength: float) -> float:
    """Effective index of the fundamental TE mode of a symmetric slab."""
    k0 = 2 * math.pi / wavelength
    u = slab_te_even_root(n_core, n_clad, thickness, wavelength)
    kappa = 2 * u / thickness
    return math.sqrt(n_core ** 2 - (kappa / k0) ** 2)


def slab_te_confinement(n_core: float, n_clad: float, thickness: float,
                        wavelength: float) -> float:
    """Field confinement integral(core |E|^2) / integral(total |E|^2)."""
    k0 = 2 * math.pi / wavelength
    u = slab_te_even_root(n_core, n_clad, thickness, wavelength)
    kappa = 2 * u / thickness
    neff = slab_te_neff(n_core, n_clad, thickness, wavelength)
    gamma = k0 * math.sqrt(neff ** 2 - n_clad ** 2)
    core = (thickness / 2) * (1 + math.sin(kappa * thickness)
                              / (kappa * thickness))
    clad = math.cos(u) ** 2 / gamma
    return core / (core + clad)


def brute_force_plateau(biases, rates, darks, flatness=0.05, min_points=3,
                        dark_factor=10.0):
    """All-intervals search used as an oracle for detect_plateau."""
    n = len(rates)
    best = None
    for i in range(n):
        for j in range(i + min_points - 1, n):
            seg = np.asarray(rates[i:j + 1], dtype=float)
            mean_rate = seg.mean()
            mean_dark = np.asarray(darks[i:j + 1], dtype=float).mean()
            ok = mean_rate > dark_factor * mean_dark
            for a, b in zip(seg, seg[1:]):
                if abs(b - a) > flatness * mean_rate:
                    ok = False
                    break
            if ok and (best is None or (j - i) > (best[1] - best[0])):
                best = (i, j)
    if best is None:
        return None
    return biases[best[0]], biases[best[1]]
