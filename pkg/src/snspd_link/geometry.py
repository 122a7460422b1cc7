"""Cross-sections of the hybrid taper/nanowire converter.

The converter runs along z. A chip-native waveguide (the "pic"
waveguide) tapers down underneath a printed detector chiplet made of a
constant-width detector waveguide topped by a two-wire hairpin
nanowire. ``cross_section_at`` freezes the layer stack at one z into a
rasterizable 2D :class:`CrossSection`.

Coordinates: x is lateral (waveguide axes at x = 0 when aligned), y is
vertical with y = 0 at the bottom of the pic waveguide, z is the
propagation direction with z = 0 at the start of the structure.

Rotational misalignment of the printed chiplet is approximated as a
z-dependent rigid lateral shift of the detector stack,
dx(z) = (z - pivot_z) * tan(rotation), which ignores the coupling to
higher-order modes a true rotated structure would exhibit. Results at
nonzero rotation are therefore qualitative; quantitative rotation
studies should use externally computed absorbed-energy sweeps instead
(see :func:`snspd_link.propagation.normalize_rotation_sweep`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import OutOfRangeError
from .materials import Material, builtin_materials


class Rect(NamedTuple):
    """Axis-aligned material rectangle, bounds in meters."""

    x0: float
    x1: float
    y0: float
    y1: float
    material: Material


_REL_TOL = 1e-9


@dataclass(frozen=True)
class CrossSection:
    """2D stack of material rectangles over a background material.

    Rasterization is deterministic cell-center sampling: a cell takes
    the material of the last rectangle in ``rectangles`` whose closed
    bounds contain the cell center, or the background if none does.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    dx: float
    dy: float
    background: Material
    rectangles: tuple[Rect, ...] = ()

    def __post_init__(self):
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("grid steps must be positive")
        for span, step, name in ((self.x_max - self.x_min, self.dx, "x"),
                                 (self.y_max - self.y_min, self.dy, "y")):
            if span <= 0:
                raise ValueError(f"empty domain along {name}")
            cells = span / step
            if abs(cells - round(cells)) > 1e-6:
                raise ValueError(
                    f"domain span along {name} is not a whole number of cells"
                )
            if round(cells) < 10:
                raise ValueError(f"need at least 10 cells along {name}")
        for r in self.rectangles:
            if r.x1 <= r.x0 or r.y1 <= r.y0:
                raise ValueError("rectangle with non-positive extent")
            slack_x = _REL_TOL * (self.x_max - self.x_min)
            slack_y = _REL_TOL * (self.y_max - self.y_min)
            if (r.x0 < self.x_min - slack_x or r.x1 > self.x_max + slack_x
                    or r.y0 < self.y_min - slack_y or r.y1 > self.y_max + slack_y):
                raise ValueError("rectangle extends outside the domain")

    @property
    def nx(self) -> int:
        return round((self.x_max - self.x_min) / self.dx)

    @property
    def ny(self) -> int:
        return round((self.y_max - self.y_min) / self.dy)

    def x_centers(self) -> np.ndarray:
        # midpoint-anchored so a symmetric domain gets bit-exact
        # mirror-symmetric centers
        mid = 0.5 * (self.x_min + self.x_max)
        return mid + (np.arange(self.nx) + 0.5 - self.nx / 2) * self.dx

    def y_centers(self) -> np.ndarray:
        mid = 0.5 * (self.y_min + self.y_max)
        return mid + (np.arange(self.ny) + 0.5 - self.ny / 2) * self.dy

    def materials(self) -> tuple[Material, ...]:
        """Background first, then rectangle materials in stacking order."""
        return (self.background,) + tuple(r.material for r in self.rectangles)

    def material_map(self) -> np.ndarray:
        """(ny, nx) int grid indexing into :meth:`materials`."""
        xc = self.x_centers()
        yc = self.y_centers()
        idx = np.zeros((self.ny, self.nx), dtype=np.intp)
        for j, r in enumerate(self.rectangles, start=1):
            in_x = (xc >= r.x0) & (xc <= r.x1)
            in_y = (yc >= r.y0) & (yc <= r.y1)
            idx[np.ix_(in_y, in_x)] = j
        return idx

    def permittivity_grid(self, wavelength: float) -> np.ndarray:
        """(ny, nx) complex relative permittivity at ``wavelength``."""
        idx = self.material_map()
        eps = np.array([m.permittivity_at(wavelength) for m in self.materials()])
        return eps[idx]

    def region_mask(self, material: Material) -> np.ndarray:
        """(ny, nx) bool mask of cells rasterized to ``material``."""
        idx = self.material_map()
        mats = self.materials()
        hits = [j for j, m in enumerate(mats) if m == material]
        if not hits:
            raise ValueError(f"material {material.name!r} not in cross-section")
        return np.isin(idx, hits)


@dataclass(frozen=True)
class TaperedWaveguide:
    """Chip waveguide that tapers linearly from width_start to width_end."""

    thickness: float
    width_start: float
    width_end: float
    taper_length: float
    material: Material


@dataclass(frozen=True)
class StripWaveguide:
    thickness: float
    width: float
    material: Material


@dataclass(frozen=True)
class HairpinNanowire:
    """Hairpin detector modeled as two parallel wires."""

    thickness: float
    wire_width: float
    gap: float
    material: Material


@dataclass(frozen=True)
class SpacerLayer:
    thickness: float
    material: Material


@dataclass(frozen=True)
class ConverterGeometry:
    """z-parameterized layout of the hybrid mode converter.

    ``z1`` is where the hairpin (and the detector waveguide under it)
    starts, ``z2`` is where the pic waveguide ends, and ``dz2`` extends
    the hairpin past the pic tip, so the hairpin covers
    [z1, z1 + (z2 - z1) + dz2]. The pic taper ends at z2 and starts at
    z2 - taper_length, which by default sits at z1 (taper fully under
    the hairpin).
    """

    pic: TaperedWaveguide
    detector: StripWaveguide
    nanowire: HairpinNanowire
    gap_layer: SpacerLayer
    cladding_above: Material
    cladding_below: Material
    z1: float
    z2: float
    dz2: float
    rotation_offset_deg: float = 0.0
    pivot_z: float | None = None
    grid_dx: float = 20e-9
    grid_dy: float = 10e-9
    padding: float = 1.5e-6

    def __post_init__(self):
        for name in ("z1", "dz2", "grid_dx", "grid_dy", "padding"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.grid_dx <= 0 or self.grid_dy <= 0:
            raise ValueError("grid steps must be positive")
        if self.z1 >= self.z2:
            raise ValueError("z1 must be below z2")
        for obj, attrs in ((self.pic, ("thickness", "width_start", "width_end",
                                       "taper_length")),
                           (self.detector, ("thickness", "width")),
                           (self.nanowire, ("thickness", "wire_width", "gap"))):
            for a in attrs:
                if getattr(obj, a) <= 0:
                    raise ValueError(f"{type(obj).__name__}.{a} must be positive")
        if self.gap_layer.thickness < 0:
            raise ValueError("gap layer thickness must be non-negative")
        if self.taper_start < 0:
            raise ValueError("pic taper would start before z = 0")

    @property
    def dz1(self) -> float:
        return self.z2 - self.z1

    @property
    def hairpin_length(self) -> float:
        """Nanowire-covered detector-waveguide length, dz1 + dz2."""
        return self.dz1 + self.dz2

    @property
    def hairpin_end(self) -> float:
        return self.z1 + self.hairpin_length

    @property
    def total_length(self) -> float:
        return max(self.z2, self.hairpin_end)

    @property
    def taper_start(self) -> float:
        return self.z2 - self.pic.taper_length

    @property
    def rotation_pivot(self) -> float:
        return self.taper_start if self.pivot_z is None else self.pivot_z

    def pic_width_at(self, z: float) -> float:
        """Pic waveguide width at z; linear taper between z2-taper_length and z2."""
        if z < self.taper_start:
            return self.pic.width_start
        t = (z - self.taper_start) / self.pic.taper_length
        return self.pic.width_start + t * (self.pic.width_end - self.pic.width_start)

    def detector_shift_at(self, z: float) -> float:
        """Lateral offset of the detector stack under the rotation model."""
        if self.rotation_offset_deg == 0.0:
            return 0.0
        return (z - self.rotation_pivot) * math.tan(
            math.radians(self.rotation_offset_deg))

    def _domain_half_width(self) -> float:
        det_half = max(self.detector.width / 2,
                       self.nanowire.gap / 2 + self.nanowire.wire_width)
        shifts = [abs(self.detector_shift_at(z)) for z in (0.0, self.total_length)]
        half = max(self.pic.width_start / 2, self.pic.width_end / 2,
                   det_half + max(shifts)) + self.padding
        return math.ceil(half / self.grid_dx) * self.grid_dx

    def _domain_y(self) -> tuple[float, float]:
        top = (self.pic.thickness + self.gap_layer.thickness
               + self.detector.thickness + self.nanowire.thickness + self.padding)
        ny = math.ceil((top + self.padding) / self.grid_dy)
        return -self.padding, -self.padding + ny * self.grid_dy

    def cross_section_at(self, z: float, wavelength: float,
                         include_pic: bool | None = None) -> CrossSection:
        """Layer stack at position z, rasterizable at ``wavelength``.

        Rectangles whose z-extent does not contain z are omitted, e.g.
        the pic waveguide past its tip at z2. The domain is fixed
        (z-independent) so slices along the structure share a grid.
        ``include_pic`` overrides the pic-presence rule at the tip
        itself: the stack is discontinuous at z2, and propagation
        integrals need both one-sided limits there.
        """
        if z < 0 or z > self.total_length:
            raise OutOfRangeError(
                f"z = {z:.6g} m outside structure [0, {self.total_length:.6g}] m")
        for m in set(self.materials_used()):
            m.nk_at(wavelength)  # fail early if any table lacks this wavelength

        w = self._domain_half_width()
        y_min, y_max = self._domain_y()
        rects: list[Rect] = []
        rects.append(Rect(-w, w, y_min, 0.0, self.cladding_below))
        y = self.pic.thickness
        if self.gap_layer.thickness > 0:
            rects.append(Rect(-w, w, y, y + self.gap_layer.thickness,
                              self.gap_layer.material))
        y += self.gap_layer.thickness
        if include_pic is None:
            include_pic = z <= self.z2
        if include_pic:
            half = self.pic_width_at(min(z, self.z2)) / 2
            rects.append(Rect(-half, half, 0.0, self.pic.thickness,
                              self.pic.material))
        if self.z1 <= z <= self.hairpin_end:
            shift = self.detector_shift_at(z)
            half = self.detector.width / 2
            rects.append(Rect(shift - half, shift + half, y,
                              y + self.detector.thickness, self.detector.material))
            y_wire = y + self.detector.thickness
            for side in (-1.0, 1.0):
                center = shift + side * (self.nanowire.gap / 2
                                         + self.nanowire.wire_width / 2)
                rects.append(Rect(center - self.nanowire.wire_width / 2,
                                  center + self.nanowire.wire_width / 2,
                                  y_wire, y_wire + self.nanowire.thickness,
                                  self.nanowire.material))
        return CrossSection(-w, w, y_min, y_max, self.grid_dx, self.grid_dy,
                            self.cladding_above, tuple(rects))

    def materials_used(self) -> tuple[Material, ...]:
        return (self.pic.material, self.detector.material, self.nanowire.material,
                self.gap_layer.material, self.cladding_above, self.cladding_below)


def silicon_hybrid_defaults(materials: dict[str, Material] | None = None,
                            **overrides) -> ConverterGeometry:
    """Hybrid converter defaults for the silicon C+L-band device.

    220 nm x 400 nm silicon waveguide tapering to 200 nm over 40 um,
    250 nm x 1 um nitride detector waveguide, 9 nm x 90 nm hairpin wires
    with a 120 nm gap (the gap is a documented assumption, not a
    measured value), hairpin length 90 um, taper fully under the
    hairpin. Keyword overrides replace individual ConverterGeometry
    fields.
    """
    mats = dict(builtin_materials())
    if materials:
        mats.update(materials)
    fields = dict(
        pic=TaperedWaveguide(220e-9, 400e-9, 200e-9, 40e-6, mats["silicon"]),
        detector=StripWaveguide(250e-9, 1e-6, mats["silicon_nitride"]),
        nanowire=HairpinNanowire(9e-9, 90e-9, 120e-9, mats["nbtin"]),
        gap_layer=SpacerLayer(0.0, mats["vacuum"]),
        cladding_above=mats["vacuum"],
        cladding_below=mats["silica"],
        z1=10e-6,
        z2=50e-6,
        dz2=50e-6,
    )
    fields.update(overrides)
    return ConverterGeometry(**fields)
