"""Materials with tabulated complex refractive index.

A material is a wavelength-ordered table of (wavelength, n, k) knots with
linear interpolation between knots and a hard error outside the table.
The forward-propagation convention is exp(-i beta z), so the complex
index is n - i*k with k >= 0 for passive media and the permittivity is
(n - i*k)**2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeError


@dataclass(frozen=True)
class Material:
    """Passive optical material defined by a dispersion table.

    ``dispersion`` holds (wavelength_m, n, k) rows with strictly
    increasing wavelengths and k >= 0 everywhere.
    """

    name: str
    dispersion: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if not self.dispersion:
            raise ValueError(f"material {self.name!r}: dispersion table is empty")
        rows = []
        for row in self.dispersion:
            if len(row) != 3:
                raise ValueError(
                    f"material {self.name!r}: table rows must be (wavelength, n, k)"
                )
            rows.append(tuple(float(v) for v in row))
        wavelengths = [r[0] for r in rows]
        if any(w <= 0 for w in wavelengths):
            raise ValueError(f"material {self.name!r}: wavelengths must be positive")
        if any(b <= a for a, b in zip(wavelengths, wavelengths[1:])):
            raise ValueError(
                f"material {self.name!r}: wavelengths must be strictly increasing"
            )
        if any(r[2] < 0 for r in rows):
            raise ValueError(f"material {self.name!r}: k < 0 (gain) is not allowed")
        if any(r[1] <= 0 for r in rows):
            raise ValueError(f"material {self.name!r}: n must be positive")
        object.__setattr__(self, "dispersion", tuple(rows))

    @property
    def wavelength_min(self) -> float:
        return self.dispersion[0][0]

    @property
    def wavelength_max(self) -> float:
        return self.dispersion[-1][0]

    @property
    def is_absorbing(self) -> bool:
        return any(r[2] > 0 for r in self.dispersion)

    def nk_at(self, wavelength: float) -> tuple[float, float]:
        """Linearly interpolated (n, k) at ``wavelength`` (meters).

        Exact at the knots; raises OutOfRangeError outside the table,
        never extrapolates.
        """
        wl = float(wavelength)
        lo, hi = self.wavelength_min, self.wavelength_max
        if wl < lo or wl > hi:
            raise OutOfRangeError(
                f"material {self.name!r}: wavelength {wl:.6g} m outside table "
                f"range [{lo:.6g}, {hi:.6g}] m"
            )
        table = self.dispersion
        for row in table:
            if row[0] == wl:
                return row[1], row[2]
        wls = np.array([r[0] for r in table])
        i = int(np.searchsorted(wls, wl)) - 1
        w0, n0, k0 = table[i]
        w1, n1, k1 = table[i + 1]
        t = (wl - w0) / (w1 - w0)
        return n0 + t * (n1 - n0), k0 + t * (k1 - k0)

    def index_at(self, wavelength: float) -> complex:
        """Complex index n - i*k at ``wavelength``."""
        n, k = self.nk_at(wavelength)
        return complex(n, -k)

    def permittivity_at(self, wavelength: float) -> complex:
        """Relative permittivity (n - i*k)**2 at ``wavelength``."""
        return self.index_at(wavelength) ** 2


def constant_material(name: str, n: float, k: float = 0.0,
                      wavelength_span: tuple[float, float] = (200e-9, 5e-6)) -> Material:
    """Dispersionless material valid over ``wavelength_span``."""
    lo, hi = wavelength_span
    return Material(name, ((lo, n, k), (hi, n, k)))


def builtin_materials() -> dict[str, Material]:
    """Default material set for the hybrid silicon device.

    Tables are coarse near-infrared references intended as editable
    starting points. The ``nbtin`` entry in particular is a PLACEHOLDER,
    not a measured film property: bulk-like literature constants
    (n ~ 5.2, k ~ 5.8 near 1550 nm) over-absorb by more than an order of
    magnitude in this scalar model, so the shipped table uses softer
    effective values, chosen metal-like (k > n, negative real
    permittivity) and scaled so the simulated hairpin attenuation matches
    the few-1e3/m scale this device class exhibits. Any quantitative
    absorption study should override it with constants measured for the
    actual film and calibrate against a known device.
    """
    silicon = Material("silicon", (
        (1.20e-6, 3.5193, 0.0),
        (1.30e-6, 3.5007, 0.0),
        (1.40e-6, 3.4857, 0.0),
        (1.50e-6, 3.4777, 0.0),
        (1.57e-6, 3.4749, 0.0),
        (1.60e-6, 3.4737, 0.0),
        (1.70e-6, 3.4699, 0.0),
    ))
    silicon_nitride = Material("silicon_nitride", (
        (1.20e-6, 2.0100, 0.0),
        (1.40e-6, 2.0030, 0.0),
        (1.55e-6, 1.9980, 0.0),
        (1.60e-6, 1.9960, 0.0),
        (1.70e-6, 1.9930, 0.0),
    ))
    silica = Material("silica", (
        (1.20e-6, 1.4482, 0.0),
        (1.30e-6, 1.4469, 0.0),
        (1.40e-6, 1.4458, 0.0),
        (1.50e-6, 1.4446, 0.0),
        (1.60e-6, 1.4434, 0.0),
        (1.70e-6, 1.4422, 0.0),
    ))
    # Placeholder effective NbTiN constants; see docstring above.
    nbtin = Material("nbtin", (
        (1.20e-6, 0.7, 1.4),
        (1.70e-6, 0.7, 1.4),
    ))
    vacuum = constant_material("vacuum", 1.0)
    return {m.name: m for m in (silicon, silicon_nitride, silica, nbtin, vacuum)}
