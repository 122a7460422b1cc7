# Detection efficiency versus hairpin overlap length.
#
# Extending the detector waveguide (and the hairpin on it) past the
# chip-waveguide tip absorbs more of the surviving light; the efficiency
# climbs toward the taper-loss-limited asymptote
#     t_det^2 (1 - A1) + t_det^2 t_pic^2 A1,
# where A1 is the survival across the taper segment. A few hundred
# microns of detector waveguide saturate the budget.
#
# Runtime: ~40 s fresh; the taper slices and the z-invariant tail are
# shared across lengths through the solve cache.

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from snspd_link import (
    TipTransmissions,
    build_absorption_profile,
    detection_efficiency,
    silicon_hybrid_defaults,
)

WAVELENGTH = 1.57e-6
SPACING = 2.5e-6  # identical slice lattice across lengths, maximizes reuse

tips = TipTransmissions()
extensions = np.array([10, 20, 30, 50, 80, 120, 180, 250]) * 1e-6
effs = []
asymptote = None
for dz2 in extensions:
    geom = silicon_hybrid_defaults(dz2=dz2)
    n = int(round(geom.hairpin_length / SPACING)) + 1
    profile = build_absorption_profile(geom, WAVELENGTH, n)
    eff = detection_efficiency(profile, geom.z1, geom.z2, tips)
    effs.append(eff)
    if asymptote is None:
        a1 = profile.survival_at(geom.z2)
        asymptote = tips.t_det_sq * (1 - a1) + tips.t_det_sq * tips.t_pic_sq * a1
    print(f"extension {dz2*1e6:6.1f} um -> efficiency {eff:.4f}")

print(f"\ntaper-loss-limited asymptote: {asymptote:.4f}")
print(f"250 um reaches {effs[-1]/asymptote:.1%} of it")

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(extensions * 1e6, effs, "o-")
ax.axhline(asymptote, color="gray", ls="--", lw=0.8, label="asymptote")
ax.set_xlabel("hairpin extension past the tip (um)")
ax.set_ylabel("detection efficiency")
ax.legend()
fig.tight_layout()
fig.savefig("demos/output/overlap_study.png", dpi=150)
print("wrote demos/output/overlap_study.png")
