"""Detector figures of merit from raw bench traces.

Covers efficiency extraction with uncertainty, bias-plateau detection,
switching current, count-rate linearity, timing-jitter FWHM, extinction
ratio, and dark-count checks. Count rates are validated against the
counter granularity: every rate must be an integer number of counts over
the integration window.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.optimize

from .calibration import PhotonFlux
from .errors import (
    BiasNotFoundError,
    DataContractError,
    DegenerateFitError,
    DivideByZeroError,
    FitFailureError,
    InsufficientPointsError,
    NoSwitchError,
)

FWHM_PER_SIGMA = 2 * math.sqrt(2 * math.log(2))  # 2.3548...


def _check_granularity(rate: float, integration_time: float, label: str) -> None:
    counts = rate * integration_time
    if abs(counts - round(counts)) > 1e-6 + 1e-9 * abs(counts):
        raise DataContractError(
            f"{label} {rate:g} Hz is not a whole number of counts over "
            f"{integration_time:g} s")


@dataclass(frozen=True)
class CountTrace:
    """Photon and dark count rates versus bias current.

    ``points`` rows are (bias_A, photon_rate_Hz, dark_rate_Hz) with
    strictly increasing bias. Rates must respect the counter granularity
    of 1/integration_time.
    """

    integration_time: float
    points: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if self.integration_time <= 0:
            raise DataContractError("integration time must be positive")
        rows = tuple(tuple(float(v) for v in p) for p in self.points)
        if not rows:
            raise DataContractError("count trace is empty")
        biases = [r[0] for r in rows]
        if any(b <= a for a, b in zip(biases, biases[1:])):
            raise DataContractError("bias values must be strictly increasing")
        for bias, photon, dark in rows:
            if photon < 0 or dark < 0:
                raise DataContractError("count rates must be non-negative")
            _check_granularity(photon, self.integration_time,
                               f"photon rate at {bias:g} A")
            _check_granularity(dark, self.integration_time,
                               f"dark rate at {bias:g} A")
        object.__setattr__(self, "points", rows)

    def biases(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    def photon_rates(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def dark_rates(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])

    def index_of(self, bias: float) -> int:
        for i, p in enumerate(self.points):
            if p[0] == bias:
                return i
        raise BiasNotFoundError(f"bias {bias:g} A not in trace")


@dataclass(frozen=True)
class IVTrace:
    """(bias_A, voltage_V) rows with strictly increasing bias."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        rows = tuple((float(b), float(v)) for b, v in self.points)
        if len(rows) < 2:
            raise DataContractError("IV trace needs at least two points")
        biases = [r[0] for r in rows]
        if any(b <= a for a, b in zip(biases, biases[1:])):
            raise DataContractError("bias values must be strictly increasing")
        object.__setattr__(self, "points", rows)


@dataclass(frozen=True)
class JitterHistogram:
    """Detection-time histogram with uniform bins.

    ``counts`` are non-negative integers per bin; ``t0`` is the start of
    the first bin. A Gaussian fit needs at least five nonempty bins.
    """

    bin_width: float
    counts: tuple[int, ...]
    t0: float = 0.0

    def __post_init__(self):
        if self.bin_width <= 0:
            raise DataContractError("bin width must be positive")
        vals = []
        for c in self.counts:
            if c < 0 or c != int(c):
                raise DataContractError("bin counts must be non-negative integers")
            vals.append(int(c))
        if not vals:
            raise DataContractError("histogram is empty")
        object.__setattr__(self, "counts", tuple(vals))

    def bin_centers(self) -> np.ndarray:
        return self.t0 + (np.arange(len(self.counts)) + 0.5) * self.bin_width

    @property
    def nonempty_bins(self) -> int:
        return sum(1 for c in self.counts if c > 0)


@dataclass(frozen=True)
class EfficiencyReport:
    """Extracted on-chip detection efficiency with uncertainty."""

    ode: float
    ode_sigma: float
    bias: float
    dark_rate: float
    wavelength: float | None = None
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.ode <= 1:
            raise DataContractError(f"efficiency {self.ode:g} outside [0, 1]")
        if self.ode_sigma < 0:
            raise DataContractError("efficiency sigma must be non-negative")

    def summary(self) -> str:
        pct = 100 * self.ode
        sig = 100 * self.ode_sigma
        wl = ("" if self.wavelength is None
              else f" at {self.wavelength * 1e9:.0f} nm")
        return (f"on-chip detection efficiency {pct:.2f} +/- {sig:.2f} %{wl} "
                f"(bias {self.bias * 1e6:.2f} uA, dark {self.dark_rate:g} Hz)")


def extract_efficiency(trace: CountTrace, at_bias: float, flux: PhotonFlux,
                       wavelength: float | None = None) -> EfficiencyReport:
    """Detection efficiency at one bias point with propagated uncertainty.

    The efficiency is the dark-subtracted photon rate over the photon
    flux. The count-rate scatter is the sample standard deviation of the
    seven photon rates nearest in bias to the operating point (the point
    itself included; distance ties resolve toward lower bias), and the
    relative flux and count errors add in quadrature.
    """
    if len(trace.points) < 7:
        raise InsufficientPointsError(
            f"need at least 7 trace points, got {len(trace.points)}")
    i0 = trace.index_of(at_bias)
    bias, rate, dark = trace.points[i0]
    if flux.rate <= 0:
        raise DataContractError("photon flux must be positive")
    ode = max(0.0, rate - dark) / flux.rate

    biases = trace.biases()
    order = sorted(range(len(biases)),
                   key=lambda i: (abs(biases[i] - bias), biases[i]))
    nearest = sorted(order[:7])
    sigma_counts = float(np.std(trace.photon_rates()[nearest], ddof=1))
    rel_counts = sigma_counts / rate if rate > 0 else 0.0
    rel_flux = flux.sigma / flux.rate
    ode_sigma = ode * math.hypot(rel_counts, rel_flux)
    return EfficiencyReport(
        ode=ode, ode_sigma=ode_sigma, bias=bias, dark_rate=dark,
        wavelength=wavelength,
        inputs={
            "photon_rate_hz": rate,
            "dark_rate_hz": dark,
            "flux_hz": flux.rate,
            "flux_sigma_hz": flux.sigma,
            "counts_sigma_hz": sigma_counts,
            "n_sigma_points": len(nearest),
            "integration_time_s": trace.integration_time,
        })


def detect_plateau(trace: CountTrace, flatness: float = 0.05,
                   min_points: int = 3,
                   dark_factor: float = 10.0) -> tuple[float, float] | None:
    """Longest saturated bias interval, or None.

    An interval of at least ``min_points`` qualifies when every
    neighbor-to-neighbor rate change stays within ``flatness`` of the
    interval's mean rate and that mean exceeds ``dark_factor`` times the
    interval's mean dark rate. Returns (bias_lo, bias_hi) of the longest
    qualifying interval, ties resolved toward lower bias.
    """
    if len(trace.points) < 5:
        raise InsufficientPointsError("need at least 5 points for plateau search")
    rates = trace.photon_rates()
    darks = trace.dark_rates()
    biases = trace.biases()
    n = len(rates)
    best: tuple[int, int] | None = None
    for i in range(n):
        for j in range(i + min_points - 1, n):
            seg = rates[i:j + 1]
            mean_rate = float(seg.mean())
            mean_dark = float(darks[i:j + 1].mean())
            if mean_rate <= dark_factor * mean_dark:
                continue
            if np.max(np.abs(np.diff(seg))) > flatness * mean_rate:
                continue
            if best is None or (j - i) > (best[1] - best[0]):
                best = (i, j)
    if best is None:
        return None
    return float(biases[best[0]]), float(biases[best[1]])


def switching_current(iv: IVTrace, v_threshold: float = 50e-6) -> float:
    """Bias where the wire leaves the zero-voltage state.

    Returns the bias of the last point with |V| below ``v_threshold``
    before the first point at or above it.
    """
    if v_threshold <= 0:
        raise ValueError("v_threshold must be positive")
    points = iv.points
    if abs(points[0][1]) >= v_threshold:
        raise NoSwitchError(
            "trace starts at or above the voltage threshold (no superconducting "
            "branch at the origin)")
    for i, (_, v) in enumerate(points):
        if abs(v) >= v_threshold:
            return points[i - 1][0]
    raise NoSwitchError(
        f"voltage never reached {v_threshold:g} V (still superconducting)")


def linearity_fit(points: Sequence[tuple[float, float]],
                  dark_floor: float = 0.0) -> tuple[float, float]:
    """Slope per decade of log10(rate) against expected flux decades.

    Fits log10(rate) versus -attenuation_dB/10; a detector counting
    single photons linearly has slope 1. Points at or below
    ``dark_floor`` are discarded. Returns (slope, r_squared).
    """
    kept = [(float(db), float(rate)) for db, rate in points
            if float(rate) > dark_floor]
    if len(kept) < 3:
        raise InsufficientPointsError(
            f"need at least 3 points above the dark floor, got {len(kept)}")
    x = np.array([-db / 10.0 for db, _ in kept])
    y = np.log10([rate for _, rate in kept])
    if np.ptp(x) == 0:
        raise DegenerateFitError("all attenuation values are equal")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), r_squared


def _gaussian_with_floor(t, amplitude, center, sigma, floor):
    return amplitude * np.exp(-((t - center) ** 2) / (2 * sigma ** 2)) + floor


def jitter_fwhm(hist: JitterHistogram) -> float:
    """FWHM of a Gaussian fitted to the detection-time histogram.

    The fit has amplitude, center, sigma, and a flat background floor;
    FWHM = 2 sqrt(2 ln 2) sigma. Internally it runs in bin units with
    counts normalized to the peak (picosecond sigmas against 1e5-count
    amplitudes are too ill-scaled to optimize directly) and weights bins
    by sqrt(counts), the Poisson expectation. A single-bin histogram
    cannot resolve a width, so it returns the bin width with a
    resolution warning.
    """
    if hist.nonempty_bins == 1:
        warnings.warn("all counts in one bin; width at or below the bin "
                      "resolution", stacklevel=2)
        return hist.bin_width
    if hist.nonempty_bins < 5:
        raise FitFailureError(
            f"need at least 5 nonempty bins to fit, got {hist.nonempty_bins}")
    c = np.asarray(hist.counts, dtype=float)
    scale = float(c.max())
    y = c / scale
    u = np.arange(len(c), dtype=float)  # bin units

    floor0 = float(np.median(y))
    center0 = float(np.argmax(y))
    weights = np.clip(y - floor0, 0.0, None) + 1e-12
    sigma0 = max(float(np.sqrt(np.average((u - center0) ** 2,
                                          weights=weights))), 0.5)
    p0 = (max(1.0 - floor0, 1e-3), center0, sigma0, floor0)
    noise = np.sqrt(np.maximum(c, 1.0)) / scale
    try:
        popt, _ = scipy.optimize.curve_fit(
            _gaussian_with_floor, u, y, p0=p0, sigma=noise,
            bounds=([0.0, -len(c), 0.1, 0.0],
                    [np.inf, 2.0 * len(c), np.inf, np.inf]),
            maxfev=20000)
    except (RuntimeError, ValueError) as exc:
        raise FitFailureError(f"gaussian fit failed: {exc}") from exc
    resid = y - _gaussian_with_floor(u, *popt)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    if popt[0] > 0 and rms > 0.5 * popt[0]:
        raise FitFailureError(
            f"gaussian fit residual rms {rms:.3g} too large against "
            f"amplitude {popt[0]:.3g}")
    return FWHM_PER_SIGMA * float(popt[2]) * hist.bin_width


@dataclass(frozen=True)
class ExtinctionRatio:
    """dB ratio of coupled to uncoupled count rates.

    ``lower_bound`` marks a ratio floored by the counter granularity
    because the uncoupled channel recorded zero counts.
    """

    db: float
    lower_bound: bool = False

    def __str__(self) -> str:
        if self.lower_bound:
            return f"> {self.db:.0f} dB"
        return f"{self.db:.2f} dB"


def extinction_ratio(coupled_rate: float, uncoupled_rate: float,
                     integration_time: float | None = None) -> ExtinctionRatio:
    """Extinction between the coupled and an uncoupled detector.

    With a zero uncoupled rate the true ratio is unbounded; if the
    integration time is known, the one-count granularity floor
    1/integration_time bounds it from below instead.
    """
    if coupled_rate <= 0:
        raise DataContractError("coupled rate must be positive")
    if uncoupled_rate < 0:
        raise DataContractError("uncoupled rate must be non-negative")
    if uncoupled_rate > 0:
        return ExtinctionRatio(10 * math.log10(coupled_rate / uncoupled_rate))
    if integration_time is None:
        raise DivideByZeroError(
            "uncoupled rate is zero and no integration time was given to floor it")
    floor = 1.0 / integration_time
    return ExtinctionRatio(10 * math.log10(coupled_rate / floor),
                           lower_bound=True)


def dark_count_rate(trace: CountTrace, bias: float) -> float:
    """Dark rate at ``bias``; granularity is enforced at ingestion."""
    i = trace.index_of(bias)
    dark = trace.points[i][2]
    _check_granularity(dark, trace.integration_time, f"dark rate at {bias:g} A")
    return dark
