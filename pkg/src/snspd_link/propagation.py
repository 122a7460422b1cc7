"""Mode-evolution absorption integral and on-chip detection efficiency.

The weight A(z) of the adiabatically followed fundamental mode obeys

    dA/dz = (-i k(z) - alpha(z)) A(z),

with k and alpha the real and attenuation parts of the local propagation
constant (alpha is the non-negative decay rate; a passive converter can
only lose power). The survival |A|^2 between slice samples is accumulated
with the trapezoid rule,

    |A|^2(z_{j+1}) = |A|^2(z_j) * exp(-2 * (alpha_j + alpha_{j+1})/2 * dz),

and the detection efficiency of the two-segment converter is

    t_det2 * (1 - A1) + t_det2 * t_pic2 * A1 * (1 - A2),

where A1 = |A(z1, z2-z1)|^2 is the survival across the taper segment,
A2 the survival across the remaining hairpin, and t_det2/t_pic2 the
power transmissions of the two taper tips.
"""

from __future__ import annotations

import hashlib
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    MissingAlignedPointError,
    NonConvergenceError,
    OutOfRangeError,
    SnspdLinkError,
)
from .geometry import ConverterGeometry
from .modes import solve_modes


@dataclass(frozen=True)
class TipTransmissions:
    """Power transmissions across the two taper tips, each in (0, 1].

    Defaults are the device-class estimates for the silicon converter;
    they are configuration inputs, not computed here.
    """

    t_det_sq: float = 0.995
    t_pic_sq: float = 0.925

    def __post_init__(self):
        for name in ("t_det_sq", "t_pic_sq"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")


@dataclass(frozen=True)
class AbsorptionProfile:
    """Per-slice propagation constants and accumulated mode survival.

    ``z`` is strictly increasing, ``survival`` is non-increasing with
    survival[0] = 1. ``convergence_estimate`` is the change in end-to-end
    absorbed fraction against a half-resolution subsampling, when known.
    """

    wavelength: float
    z: np.ndarray
    k: np.ndarray
    alpha: np.ndarray
    n_eff: np.ndarray
    survival: np.ndarray
    convergence_estimate: float | None = None

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.ndim != 1 or z.size < 2:
            raise ValueError("profile needs at least two slice positions")
        if np.any(np.diff(z) <= 0):
            raise ValueError("slice positions must be strictly increasing")
        s = np.asarray(self.survival, dtype=float)
        if s.shape != z.shape:
            raise ValueError("survival must match slice positions")
        if s[0] != 1.0:
            raise ValueError("survival must start at 1")
        if np.any(np.diff(s) > 1e-15):
            raise ValueError("survival must be non-increasing")
        if np.any(np.asarray(self.alpha) < 0):
            raise ValueError("alpha must be non-negative")

    @classmethod
    def from_n_eff(cls, z: Sequence[float], n_eff: Sequence[complex],
                   wavelength: float,
                   convergence_estimate: float | None = None) -> "AbsorptionProfile":
        """Build k, alpha, and trapezoid survival from effective indices."""
        z = np.asarray(z, dtype=float)
        n_eff = np.asarray(n_eff, dtype=complex)
        k0 = 2 * math.pi / wavelength
        k = k0 * n_eff.real
        alpha = k0 * np.clip(-n_eff.imag, 0.0, None)
        return cls(wavelength=float(wavelength), z=z, k=k, alpha=alpha,
                   n_eff=n_eff, survival=_trapezoid_survival(z, alpha),
                   convergence_estimate=convergence_estimate)

    def survival_at(self, z: float) -> float:
        """Survival |A|^2 at z, log-linear between slice samples."""
        zs = self.z
        if z < zs[0] or z > zs[-1]:
            raise OutOfRangeError(
                f"z = {z:.6g} m outside profile [{zs[0]:.6g}, {zs[-1]:.6g}] m")
        log_s = np.log(np.maximum(self.survival, 1e-300))
        return float(np.exp(np.interp(z, zs, log_s)))


def _trapezoid_survival(z: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    steps = -(alpha[:-1] + alpha[1:]) * np.diff(z)  # 2 * mean(alpha) * dz
    out = np.empty_like(z)
    out[0] = 1.0
    out[1:] = np.cumprod(np.exp(steps))
    return out


def _subsample_estimate(segments: list[tuple[np.ndarray, np.ndarray]]) -> float:
    """End-to-end survival change against half-resolution subsampling."""
    fine_end = 1.0
    coarse_end = 1.0
    for z, alpha in segments:
        idx = list(range(0, len(z), 2))
        if idx[-1] != len(z) - 1:
            idx.append(len(z) - 1)
        fine_end *= float(_trapezoid_survival(z, alpha)[-1])
        coarse_end *= float(_trapezoid_survival(z[idx], alpha[idx])[-1])
    return abs(fine_end - coarse_end)


class _SolveCache:
    """n_eff cache keyed by rasterized permittivity, shared across builds."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict[bytes, complex] = {}

    def key(self, eps: np.ndarray, dx: float, dy: float,
            wavelength: float) -> bytes:
        h = hashlib.sha1()
        h.update(np.ascontiguousarray(eps).tobytes())
        h.update(np.array([eps.shape[0], eps.shape[1]], dtype=np.int64).tobytes())
        h.update(np.array([dx, dy, wavelength]).tobytes())
        return h.digest()

    def get(self, key: bytes) -> complex | None:
        with self._lock:
            return self._data.get(key)

    def put(self, key: bytes, value: complex) -> None:
        with self._lock:
            self._data[key] = value

    def clear(self) -> None:
        with self._lock:
            self._data.clear()


_shared_cache = _SolveCache()


def clear_solve_cache() -> None:
    """Drop memoized per-slice effective indices."""
    _shared_cache.clear()


def _fundamental_n_eff(geom: ConverterGeometry, z: float, wavelength: float,
                       include_pic: bool | None = None) -> complex:
    cs = geom.cross_section_at(z, wavelength, include_pic=include_pic)
    eps = cs.permittivity_grid(wavelength)
    key = _shared_cache.key(eps, cs.dx, cs.dy, wavelength)
    hit = _shared_cache.get(key)
    if hit is not None:
        return hit
    n_eff = solve_modes(cs, wavelength, n_modes=1)[0].n_eff
    _shared_cache.put(key, n_eff)
    return n_eff


def _segment_points(n_slices: int, len1: float, len2: float) -> tuple[int, int]:
    """Split n_slices sample points between the two segments.

    Both segments keep at least two points and share the boundary, so
    n1 + n2 - 1 == n_slices.
    """
    n1 = 1 + round((n_slices - 1) * len1 / (len1 + len2))
    n1 = min(max(n1, 2), n_slices - 1)
    return n1, n_slices + 1 - n1


def build_absorption_profile(geom: ConverterGeometry, wavelength: float,
                             n_slices: int,
                             threads: int = 1) -> AbsorptionProfile:
    """Solve the fundamental mode on ``n_slices`` positions over the hairpin.

    Positions span [z1, z1 + dz1 + dz2], uniformly within each of the
    two segments [z1, z2] and [z2, end] so that a sample always lands on
    the pic tip, where the stack is discontinuous. The stored
    attenuation at the tip carries the left (pic still present) limit;
    the survival accumulation across the second segment uses the right
    limit, so the trapezoid rule never straddles the discontinuity.
    Identical cross-sections (the z-invariant stretch past the tip) are
    solved once and memoized. Solver failures are re-raised with the
    offending z attached.
    """
    if n_slices < 2:
        raise ValueError("need at least two slices")

    def solve_many(zs, include_pic=None):
        def solve_one(z: float) -> complex:
            try:
                return _fundamental_n_eff(geom, z, wavelength,
                                          include_pic=include_pic)
            except SnspdLinkError as exc:
                raise type(exc)(
                    f"{exc} (while solving slice at z = {z:.6g} m)") from exc
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return np.asarray(list(pool.map(solve_one, zs)), dtype=complex)
        return np.asarray([solve_one(z) for z in zs], dtype=complex)

    k0 = 2 * math.pi / wavelength
    split = geom.z1 < geom.z2 < geom.hairpin_end
    if not split:
        zs = np.linspace(geom.z1, min(geom.z2, geom.hairpin_end), n_slices)
        n_eff = solve_many(zs)
        alpha = k0 * np.clip(-n_eff.imag, 0.0, None)
        return AbsorptionProfile.from_n_eff(
            zs, n_eff, wavelength,
            convergence_estimate=_subsample_estimate([(zs, alpha)]))

    n1, n2 = _segment_points(n_slices, geom.dz1, geom.dz2)
    zs1 = np.linspace(geom.z1, geom.z2, n1)
    zs2 = np.linspace(geom.z2, geom.hairpin_end, n2)
    n_eff1 = solve_many(zs1)
    n_eff2 = solve_many(zs2, include_pic=False)
    alpha1 = k0 * np.clip(-n_eff1.imag, 0.0, None)
    alpha2 = k0 * np.clip(-n_eff2.imag, 0.0, None)
    s1 = _trapezoid_survival(zs1, alpha1)
    s2 = s1[-1] * _trapezoid_survival(zs2, alpha2)
    estimate = _subsample_estimate([(zs1, alpha1), (zs2, alpha2)])
    return AbsorptionProfile(
        wavelength=float(wavelength),
        z=np.concatenate([zs1, zs2[1:]]),
        k=k0 * np.concatenate([n_eff1.real, n_eff2.real[1:]]),
        alpha=np.concatenate([alpha1, alpha2[1:]]),
        n_eff=np.concatenate([n_eff1, n_eff2[1:]]),
        survival=np.concatenate([s1, s2[1:]]),
        convergence_estimate=estimate)


def detection_efficiency(profile: AbsorptionProfile, z1: float, z2: float,
                         tips: TipTransmissions) -> float:
    """Two-segment on-chip detection efficiency from a survival profile.

    The first segment runs from z1 to z2 (pic tip), the second from z2 to
    the end of the profile.
    """
    if not z1 < z2:
        raise OutOfRangeError("z1 must be below z2")
    s1 = profile.survival_at(z1)
    s2 = profile.survival_at(z2)
    s_end = float(profile.survival[-1])
    a1 = s2 / s1
    a2 = s_end / s2
    return (tips.t_det_sq * (1 - a1)
            + tips.t_det_sq * tips.t_pic_sq * a1 * (1 - a2))


class ConvergedEfficiency(NamedTuple):
    efficiency: float
    n_slices: int
    profile: AbsorptionProfile


def converged_detection_efficiency(geom: ConverterGeometry, wavelength: float,
                                   tol: float,
                                   tips: TipTransmissions = TipTransmissions(),
                                   start_slices: int = 8,
                                   max_slices: int = 1024,
                                   threads: int = 1) -> ConvergedEfficiency:
    """Double the slice count until the efficiency change drops below tol.

    Starts at ``start_slices`` positions and doubles until
    |eff(n) - eff(n/2)| < tol, raising NonConvergenceError once n would
    exceed ``max_slices``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = start_slices
    profile = build_absorption_profile(geom, wavelength, n, threads=threads)
    eff = detection_efficiency(profile, geom.z1, geom.z2, tips)
    while True:
        if 2 * n > max_slices:
            raise NonConvergenceError(
                f"efficiency not converged to {tol:g} within {max_slices} slices "
                f"(last change at n = {n})")
        n *= 2
        profile_next = build_absorption_profile(geom, wavelength, n,
                                                threads=threads)
        eff_next = detection_efficiency(profile_next, geom.z1, geom.z2, tips)
        if abs(eff_next - eff) < tol:
            return ConvergedEfficiency(eff_next, n, profile_next)
        eff, profile = eff_next, profile_next


def normalize_rotation_sweep(absorbed_energy: Sequence[tuple[float, float]],
                             aligned_efficiency: float,
                             ) -> list[tuple[float, float]]:
    """Scale an absorbed-energy rotation sweep to detection efficiencies.

    The absorbed energy of a straight structure is proportional to its
    absorbed power fraction, so the sweep is normalized by its
    zero-angle entry and scaled by the efficiency of the aligned device:
    eff(theta) = aligned_efficiency * U(theta) / U(0). Input ordering is
    preserved. Raises MissingAlignedPointError without a theta = 0 row.
    """
    rows = [(float(a), float(u)) for a, u in absorbed_energy]
    u0 = next((u for a, u in rows if a == 0.0), None)
    if u0 is None:
        raise MissingAlignedPointError("sweep has no zero-angle entry")
    if u0 <= 0:
        raise ValueError("zero-angle absorbed energy must be positive")
    return [(a, aligned_efficiency * u / u0) for a, u in rows]
