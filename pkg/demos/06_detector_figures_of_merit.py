# Detector figures of merit from raw traces.
#
# Switching current from an IV curve, timing jitter from a histogram
# fit, single-photon linearity from an attenuation sweep, and the
# extinction ratio between a waveguide-coupled and an uncoupled
# detector. All inputs are synthetic but shaped like bench data.
#
# Runtime: a few seconds (the jitter fixture samples 1e6 events).

import math

import numpy as np

from snspd_link import (
    IVTrace,
    JitterHistogram,
    extinction_ratio,
    jitter_fwhm,
    linearity_fit,
    switching_current,
)

# --- switching current ----------------------------------------------------------
biases = [i * 0.1e-6 for i in range(81)]
volts = [0.0 if b <= 7.1e-6 + 1e-15 else 2e-3 for b in biases]
isw = switching_current(IVTrace(tuple(zip(biases, volts))))
print(f"switching current: {isw*1e6:.2f} uA")

# --- timing jitter ---------------------------------------------------------------
sigma = 242e-12 / (2 * math.sqrt(2 * math.log(2)))
rng = np.random.default_rng(7)
arrivals = rng.normal(0.0, sigma, 10**6)
counts, edges = np.histogram(arrivals, bins=320,
                             range=(-8 * sigma, 8 * sigma))
hist = JitterHistogram(bin_width=float(edges[1] - edges[0]),
                       counts=tuple(int(c) for c in counts),
                       t0=float(edges[0]))
fwhm = jitter_fwhm(hist)
print(f"jitter FWHM: {fwhm*1e12:.1f} ps "
      f"(histogram of {len(arrivals):,} events, {hist.bin_width*1e12:.1f} ps bins)")

# --- count-rate linearity ---------------------------------------------------------
points = [(db, 2.0e6 * 10 ** (-db / 10)) for db in range(0, 35, 5)]
slope, r2 = linearity_fit(points)
print(f"linearity: {slope:.3f} decades per decade (r^2 = {r2:.6f})")

# --- extinction -------------------------------------------------------------------
print(f"extinction, coupled vs uncoupled: {extinction_ratio(1e6, 100.0)}")
print(f"extinction with a dark uncoupled channel at 0.1 s gates: "
      f"{extinction_ratio(1e6, 0.0, integration_time=0.1)}")
