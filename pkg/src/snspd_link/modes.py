"""Finite-difference waveguide eigenmode solver with complex permittivity.

Discretization is the five-point Helmholtz operator on the cell-centered
permittivity grid of a :class:`~snspd_link.geometry.CrossSection`,

    (d2/dx2 + d2/dy2) psi + k0^2 eps(x, y) psi = beta^2 psi,

which treats the dominant transverse field as continuous everywhere
(TE-polarized, semi-vectorial). Fields are taken to vanish on the domain
walls, so the domain must be padded well past the guiding structures
(1.5 um or more is the working default).

Sign conventions: forward fields go as exp(-i beta z) with
beta = (2 pi / lambda) (n' - i n''), n'' >= 0, so a passive structure
attenuates as exp(-alpha z) in amplitude with alpha = 2 pi n'' / lambda.

Internally the eigenproblem is normalized by k0^2 so eigenvalues are
n_eff^2 and the reported residual ||(H - n_eff^2) psi|| / ||psi|| is a
dimensionless quantity, required to be at or below 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    ConvergenceFailureError,
    DegenerateDenominatorError,
    NoGuidedModeError,
)
from .geometry import CrossSection
from .materials import Material

RESIDUAL_LIMIT = 1e-8

# Shift-invert target sits just below the guided-mode index ceiling.
SHIFT_MARGIN = 1e-4

ARPACK_TOL = 1e-10


@dataclass(frozen=True)
class ModeSolution:
    """One guided mode of a cross-section.

    ``field`` is the complex amplitude on the (ny, nx) cell grid,
    normalized so sum(|field|^2) * dx * dy = 1, with the phase fixed so
    the largest-magnitude sample is real and positive. ``n_eff`` is
    n' - i n'' with n'' >= 0.
    """

    wavelength: float
    n_eff: complex
    field: np.ndarray
    x: np.ndarray
    y: np.ndarray
    dx: float
    dy: float
    polarization_tag: str
    mode_index: int
    residual: float

    @property
    def n_real(self) -> float:
        return self.n_eff.real

    @property
    def n_imag(self) -> float:
        """Attenuation part of the effective index, >= 0."""
        return -self.n_eff.imag


def _helmholtz_operator(eps: np.ndarray, dx: float, dy: float,
                        wavelength: float) -> sp.csc_matrix:
    """Five-point operator normalized by k0^2; eigenvalues are n_eff^2."""
    ny, nx = eps.shape
    n = nx * ny
    k0 = 2 * math.pi / wavelength
    sx = 1.0 / (k0 * dx) ** 2
    sy = 1.0 / (k0 * dy) ** 2
    main = eps.ravel().astype(complex) - 2 * sx - 2 * sy
    ex = np.full(n - 1, sx, dtype=complex)
    ex[nx - 1::nx] = 0.0  # no coupling across row ends
    ey = np.full(n - nx, sy, dtype=complex)
    return sp.diags([main, ex, ex, ey, ey], [0, 1, -1, nx, -nx], format="csc")


def _index_ceiling(cs: CrossSection, wavelength: float) -> float:
    """Largest real index among materials that can guide.

    Metal-like entries (Re eps <= 0) repel the scalar field and cannot
    set the guided-mode ceiling, so they are ignored unless nothing else
    is present.
    """
    dielectric = [m.nk_at(wavelength)[0] for m in cs.materials()
                  if m.permittivity_at(wavelength).real > 0]
    if dielectric:
        return max(dielectric)
    return max(m.nk_at(wavelength)[0] for m in cs.materials())


def solve_modes(cs: CrossSection, wavelength: float, n_modes: int = 1,
                max_iter: int | None = None) -> list[ModeSolution]:
    """Guided eigenmodes of ``cs`` at ``wavelength``, strongest first.

    Returns up to ``n_modes`` solutions sorted by descending Re(n_eff),
    keeping only modes above the background-cladding light line. Raises
    NoGuidedModeError when nothing guided is found and
    ConvergenceFailureError when the Arnoldi iteration fails or a
    residual exceeds the declared limit.

    A single-mode request converges only the dominant eigenpair, which
    assumes the fundamental is spectrally isolated (true along this
    converter). For structures with an invariant direction the top
    eigenvalues cluster; request enough modes to span the cluster and
    take the first entry.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be at least 1")
    eps = cs.permittivity_grid(wavelength)
    ny, nx = eps.shape
    n = nx * ny
    op = _helmholtz_operator(eps, cs.dx, cs.dy, wavelength)

    n_background = cs.background.nk_at(wavelength)[0]
    sigma = (_index_ceiling(cs, wavelength) - SHIFT_MARGIN) ** 2

    k_req = 1 if n_modes == 1 else min(n_modes + 2, n - 2)
    v0 = np.ones(n) / math.sqrt(n)  # deterministic start vector
    try:
        vals, vecs = spla.eigs(op, k=k_req, sigma=sigma, which="LM", v0=v0,
                               maxiter=max_iter, tol=ARPACK_TOL,
                               ncv=min(n, max(20, 4 * k_req)))
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailureError(
            f"eigensolver converged {len(exc.eigenvalues)}/{k_req} modes "
            f"on a {ny}x{nx} grid"
        ) from exc

    order = np.argsort(-vals.real)
    solutions: list[ModeSolution] = []
    for idx in order:
        mu = vals[idx]
        n_eff = np.sqrt(mu + 0j)
        if n_eff.real <= n_background:
            continue
        if n_eff.imag > 0:
            if n_eff.imag > 1e-10 * abs(n_eff):
                raise ConvergenceFailureError(
                    f"unphysical gain in eigenvalue {mu!r}")
            n_eff = complex(n_eff.real, 0.0)
        psi = vecs[:, idx]
        residual = float(np.linalg.norm(op @ psi - mu * psi)
                         / np.linalg.norm(psi))
        if residual > RESIDUAL_LIMIT:
            raise ConvergenceFailureError(
                f"mode residual {residual:.3e} above {RESIDUAL_LIMIT:.0e} "
                f"(eigenvalue {mu!r}, grid {ny}x{nx})")
        field = psi.reshape(ny, nx)
        peak = np.unravel_index(np.argmax(np.abs(field)), field.shape)
        phase = field[peak] / abs(field[peak])
        field = field / phase
        norm = math.sqrt(float(np.sum(np.abs(field) ** 2)) * cs.dx * cs.dy)
        field = field / norm
        solutions.append(ModeSolution(
            wavelength=float(wavelength),
            n_eff=complex(n_eff.real, min(n_eff.imag, 0.0)),
            field=field,
            x=cs.x_centers(),
            y=cs.y_centers(),
            dx=cs.dx,
            dy=cs.dy,
            polarization_tag="TE-like",
            mode_index=len(solutions),
            residual=residual,
        ))
        if len(solutions) == n_modes:
            break
    if not solutions:
        raise NoGuidedModeError(
            f"no eigenvalue above the cladding light line n = {n_background:.4f}")
    return solutions


def modal_absorption(mode: ModeSolution) -> float:
    """Amplitude attenuation rate alpha = 2 pi n'' / lambda, in 1/m.

    Power decays as exp(-2 alpha L) over a propagation length L.
    """
    return 2 * math.pi * mode.n_imag / mode.wavelength


def absorbed_fraction_by_region(mode: ModeSolution, cs: CrossSection,
                                region_material: Material) -> float:
    """Fraction of the modal absorption located in ``region_material``.

    Computed as sum(Im(eps) |E|^2) over the region's cells divided by the
    same sum over all cells. Raises DegenerateDenominatorError for a
    lossless cross-section.
    """
    eps = cs.permittivity_grid(mode.wavelength)
    weight = -eps.imag * np.abs(mode.field) ** 2
    total = float(weight.sum())
    if total == 0.0:
        raise DegenerateDenominatorError(
            "total Im(eps)|E|^2 is zero (lossless structure)")
    mask = cs.region_mask(region_material)
    return float(weight[mask].sum()) / total
