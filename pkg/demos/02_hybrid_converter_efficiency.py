# On-chip detection efficiency of the hybrid taper/nanowire converter.
#
# The default device: a 220 x 400 nm silicon waveguide tapering to
# 200 nm over 40 um underneath a printed chiplet made of a 250 nm x 1 um
# nitride waveguide topped by a 90 nm two-wire hairpin. The fundamental
# mode is solved slice by slice along the converter, the attenuation
# profile alpha(z) is integrated into a survival curve, and the
# two-segment tip-loss formula turns it into a detection efficiency.
#
# Note the shipped nanowire optical constants are placeholder effective
# values for this scalar model; absolute numbers here demonstrate the
# workflow, not a calibrated device prediction.
#
# Runtime: ~20 s (the z-invariant stretch past the silicon tip is
# solved once and cached).

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from snspd_link import (
    TipTransmissions,
    converged_detection_efficiency,
    silicon_hybrid_defaults,
)
from snspd_link.io import write_profile_csv

WAVELENGTH = 1.57e-6

geom = silicon_hybrid_defaults()
print(f"converter: taper {geom.taper_start*1e6:.0f}-{geom.z2*1e6:.0f} um, "
      f"hairpin {geom.z1*1e6:.0f}-{geom.hairpin_end*1e6:.0f} um")

tips = TipTransmissions()
print(f"tip transmissions: detector {tips.t_det_sq}, chip {tips.t_pic_sq}")

eff, n_slices, profile = converged_detection_efficiency(
    geom, WAVELENGTH, tol=1e-3)
print(f"\ndetection efficiency: {eff:.4f}")
print(f"slices used: {n_slices} "
      f"(survival change vs half resolution {profile.convergence_estimate:.1e})")
print(f"survival at the silicon tip: {profile.survival_at(geom.z2):.4f}")
print(f"survival at the hairpin end: {profile.survival[-1]:.4f}")

write_profile_csv(profile, "demos/output/absorption_profile.csv")
print("\nwrote demos/output/absorption_profile.csv")

fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 5.5))
ax1.plot(profile.z * 1e6, profile.alpha / 1e3, ".-")
ax1.axvline(geom.z2 * 1e6, color="gray", ls="--", lw=0.8)
ax1.set_ylabel("alpha (1/mm)")
ax1.set_title("Attenuation and survival along the converter")
ax2.plot(profile.z * 1e6, profile.survival, ".-")
ax2.axvline(geom.z2 * 1e6, color="gray", ls="--", lw=0.8)
ax2.set_xlabel("z (um)")
ax2.set_ylabel("|A|^2")
fig.tight_layout()
fig.savefig("demos/output/hybrid_profile.png", dpi=150)
print("wrote demos/output/hybrid_profile.png")
