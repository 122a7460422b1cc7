"""Off-chip loss budget and photon-flux arithmetic.

The photon flux delivered into the chip waveguide is

    flux = P_in / (h c / lambda) * 10**(-total_dB / 10),

with the dB chain summing the laser-to-facet fiber path, the chip facet
coupler, the variable attenuator, and any extra documented stage. The
fiber-path loss is measured by hand against a power meter and dominates
the flux uncertainty; additional per-stage uncertainties, when given,
are combined in quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import NegativeLossError

# CODATA 2018 exact values.
PLANCK = 6.62607015e-34  # J s
LIGHT_SPEED = 299792458.0  # m / s

_LN10_OVER_10 = math.log(10.0) / 10.0


@dataclass(frozen=True)
class LossBudget:
    """Calibrated losses between the laser and the chip waveguide.

    All dB entries are non-negative insertion losses. ``db_fiber_sigma``
    is the one-sigma uncertainty on the fiber-path loss; ``extra_sigmas``
    holds optional further per-stage uncertainties. ``db_extra`` is a
    sensitivity knob for stages assumed lossless by default (for example
    an on-chip directional coupler at its optimized wavelength).
    """

    p_in: float
    wavelength: float
    db_fiber: float
    db_coupler: float
    db_attenuator: float
    db_fiber_sigma: float = 0.0
    db_extra: float = 0.0
    extra_sigmas: tuple[float, ...] = ()

    def __post_init__(self):
        if self.p_in <= 0:
            raise ValueError("p_in must be positive")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        for name in ("db_fiber", "db_coupler", "db_attenuator",
                     "db_fiber_sigma", "db_extra"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative")
        if any(not math.isfinite(s) or s < 0 for s in self.extra_sigmas):
            raise ValueError("extra_sigmas must be finite and non-negative")

    @property
    def total_db(self) -> float:
        return chain_db((self.db_fiber, self.db_coupler, self.db_attenuator,
                         self.db_extra))

    @property
    def total_db_sigma(self) -> float:
        return math.hypot(self.db_fiber_sigma, *self.extra_sigmas)


class PhotonFlux(NamedTuple):
    rate: float  # photons / s
    sigma: float  # photons / s


def photon_energy(wavelength: float) -> float:
    """h c / lambda in joules."""
    return PLANCK * LIGHT_SPEED / wavelength


def photon_flux(budget: LossBudget) -> PhotonFlux:
    """Photon rate in the chip waveguide and its one-sigma uncertainty.

    Adding 10 dB anywhere in the chain divides the rate by exactly ten;
    the uncertainty is rate * ln(10)/10 * sigma_dB.
    """
    rate = (budget.p_in / photon_energy(budget.wavelength)
            * 10.0 ** (-budget.total_db / 10.0))
    return PhotonFlux(rate, rate * _LN10_OVER_10 * budget.total_db_sigma)


def facet_loss_from_loopback(loopback_total_db: float, db_fiber_in: float,
                             db_fiber_out: float) -> float:
    """Per-facet coupler loss from a loopback transmission measurement.

    The two chip facets of the loopback are assumed to contribute
    equally, so the facet loss is half the loopback loss after removing
    both fiber feedthrough contributions.
    """
    residual = loopback_total_db - db_fiber_in - db_fiber_out
    if residual < 0:
        raise NegativeLossError(
            f"loopback loss {loopback_total_db} dB below the fiber-path sum "
            f"{db_fiber_in + db_fiber_out} dB")
    return residual / 2.0


def chain_db(stages: Sequence[float]) -> float:
    """Total insertion loss of cascaded stages (plain dB sum)."""
    total = 0.0
    for s in stages:
        if not math.isfinite(s):
            raise ValueError("dB stages must be finite")
        total += s
    return total
