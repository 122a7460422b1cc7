# Mode-solver benchmark against the analytic slab dispersion relation.
#
# A symmetric slab (core n = 2.0, 250 nm thick, clad n = 1.444) has a
# closed-form TE dispersion relation, which makes it the standard
# yardstick for a finite-difference mode solver. This script solves the
# slab on successively finer grids, compares against the transcendental
# root, and then adds a weak core absorption (k = 1e-4) to check the
# attenuation part of the effective index against first-order
# perturbation theory.
#
# Runtime: a few seconds.

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from scipy.optimize import brentq

from snspd_link import CrossSection, Rect, constant_material, modal_absorption, solve_modes

N_CORE, N_CLAD, THICKNESS, WAVELENGTH = 2.0, 1.444, 250e-9, 1.57e-6

# --- independent analytic reference -----------------------------------------
k0 = 2 * math.pi / WAVELENGTH
v_number = k0 * (THICKNESS / 2) * math.sqrt(N_CORE**2 - N_CLAD**2)
u_root = brentq(lambda u: u * math.tan(u) - math.sqrt(v_number**2 - u**2),
                1e-12, min(v_number, math.pi / 2) - 1e-12)
kappa = 2 * u_root / THICKNESS
n_analytic = math.sqrt(N_CORE**2 - (kappa / k0) ** 2)
print(f"analytic TE fundamental: n_eff = {n_analytic:.6f}")

# --- finite-difference solves ------------------------------------------------
# The slab is invariant along y, so ten coarse rows over a tall window
# keep the wall penalty negligible; n_modes=12 spans the cluster of
# vertical harmonics so the true top mode is always returned first.
clad = constant_material("clad", N_CLAD)


def slab(dx, core_k=0.0):
    core = constant_material("core", N_CORE, core_k)
    half = THICKNESS / 2 + 2e-6
    return CrossSection(-half, half, 0.0, 320e-6, dx, 32e-6, clad,
                        (Rect(-THICKNESS / 2, THICKNESS / 2, 0.0, 320e-6,
                              core),))


print("\n grid step   n_eff        error")
errors = {}
for dx in (10e-9, 5e-9, 2.5e-9):
    mode = solve_modes(slab(dx), WAVELENGTH, 12)[0]
    errors[dx] = mode.n_real - n_analytic
    print(f"  {dx*1e9:5.2f} nm  {mode.n_real:.6f}  {errors[dx]:+.2e}")

# --- weak absorption ----------------------------------------------------------
core_k = 1e-4
mode = solve_modes(slab(10e-9, core_k), WAVELENGTH, 12)[0]
core_integral = (THICKNESS / 2) * (1 + math.sin(kappa * THICKNESS)
                                   / (kappa * THICKNESS))
gamma = k0 * math.sqrt(n_analytic**2 - N_CLAD**2)
confinement = core_integral / (core_integral + math.cos(u_root) ** 2 / gamma)
n_imag_pred = N_CORE * core_k * confinement / n_analytic
print(f"\nabsorbing core k = {core_k:g}:")
print(f"  solver n''        = {mode.n_imag:.3e}")
print(f"  perturbation n''  = {n_imag_pred:.3e}")
print(f"  attenuation alpha = {modal_absorption(mode):.1f} 1/m")

# --- field profile plot -------------------------------------------------------
profile = np.abs(mode.field[mode.field.shape[0] // 2, :]) ** 2
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(mode.x * 1e6, profile / profile.max())
for edge in (-THICKNESS / 2, THICKNESS / 2):
    ax.axvline(edge * 1e6, color="gray", ls="--", lw=0.8)
ax.set_xlabel("x (um)")
ax.set_ylabel("|E|^2 (normalized)")
ax.set_title("Slab fundamental mode")
fig.tight_layout()
fig.savefig("demos/output/slab_mode.png", dpi=150)
print("\nwrote demos/output/slab_mode.png")
