# From bench power readings to a measured detection efficiency.
#
# The photon flux in the chip waveguide follows from the laser power and
# the calibrated dB chain (fiber path, facet coupler from a loopback
# measurement, variable attenuator). Dividing the dark-subtracted count
# rate by that flux gives the on-chip detection efficiency; the
# uncertainty combines the scatter of the seven nearest trace points
# with the fiber-path calibration uncertainty.
#
# The count trace is synthetic: a saturating bias curve that plateaus at
# 1.356 MHz with 40 Hz dark counts, acquired with 100 ms gates.
#
# Runtime: instant.

import numpy as np
from scipy.special import erf

from snspd_link import (
    CountTrace,
    LossBudget,
    detect_plateau,
    extract_efficiency,
    facet_loss_from_loopback,
    photon_flux,
)

# --- loss budget --------------------------------------------------------------
facet_db = facet_loss_from_loopback(22.23, 2.70, 2.83)
print(f"facet loss from the loopback: {facet_db:.2f} dB per facet")

budget = LossBudget(
    p_in=0.5374e-3,          # laser power, W
    wavelength=1.57e-6,
    db_fiber=4.18 + 1.35,    # laser-to-feedthrough plus feedthrough-to-facet
    db_coupler=facet_db,
    db_attenuator=70.0,
    db_fiber_sigma=0.1,
)
flux = photon_flux(budget)
print(f"total attenuation: {budget.total_db:.2f} dB")
print(f"photon flux: {flux.rate:.4g} /s (+/- {flux.sigma:.2g})")

# --- synthetic bias sweep -------------------------------------------------------
integration = 0.1
biases = np.linspace(4e-6, 8e-6, 41)
rates = 1.356e6 * (1 + erf((biases - 5.3e-6) / 0.5e-6)) / 2
rates = np.round(rates * integration) / integration
darks = np.round(40.0 * (biases > 6.5e-6) * integration) / integration
trace = CountTrace(integration, tuple(zip(biases, rates, darks)))

plateau = detect_plateau(trace)
print(f"\nplateau: {plateau[0]*1e6:.2f} to {plateau[1]*1e6:.2f} uA")

bias_point = trace.points[-6][0]
report = extract_efficiency(trace, bias_point, flux,
                            wavelength=budget.wavelength)
print(report.summary())
print(f"relative error budget: counts "
      f"{report.inputs['counts_sigma_hz']/report.inputs['photon_rate_hz']:.2e},"
      f" flux {flux.sigma/flux.rate:.2e}")
