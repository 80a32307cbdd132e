"""Probe time series -> normalized spectra, line fits, transparency, delays.

All complex spectra use the exp(-i w t) convention (spectrum = conj(rfft)),
matching the closed forms in ``analytic``: a passive medium has Im chi >= 0.
Transmission and reflection are ratios of frequency-resolved Poynting fluxes
Re[E(w) H*(w)]/2 between the main run and a vacuum reference run with
identical grid, source and probe placement, so every instrumental factor
cancels.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .constants import CONSTANTS
from .engine import ProbeRecording
from .errors import (
    FitFailedError,
    NoTransparencyError,
    OpaqueMediumError,
    SourceBandMismatchError,
    TruncationError,
)
from .materials import EmitterSpecies
from .spectrum import SpectrumResult

__all__ = [
    "power_spectrum",
    "transmission_reflection",
    "chi_from_recording",
    "LorentzFit",
    "fit_lorentzian",
    "fit_absorbance_linewidth",
    "find_transparency",
    "group_delay",
    "write_spectrum_csv",
    "write_pulse_spectra_csv",
    "write_metadata",
    "read_metadata",
]

DECAY_TAIL_FRACTION = 0.05
DECAY_ENERGY_LIMIT = 1e-6
BAND_POWER_FLOOR = 1e-4


def check_decayed(x, what="recording"):
    """Trailing 5% of samples must carry < 1e-6 of the total energy."""
    x = np.asarray(x)
    total = float(np.sum(x**2))
    if total == 0.0:
        return
    ntail = max(1, int(len(x) * DECAY_TAIL_FRACTION))
    tail = float(np.sum(x[-ntail:] ** 2))
    if tail > DECAY_ENERGY_LIMIT * total:
        raise TruncationError(
            f"{what} not decayed: trailing energy fraction {tail / total:.2e}; "
            "run longer")


def _padded_length(nsamples, dt_sample, min_resolution=None, pad_factor=4):
    n = pad_factor * nsamples
    if min_resolution is not None and min_resolution > 0:
        n = max(n, int(np.ceil(2.0 * np.pi / (min_resolution * dt_sample))))
    return 1 << int(np.ceil(np.log2(max(n, 16))))


def power_spectrum(recording: ProbeRecording, min_resolution=None,
                   pad_factor=4, require_decayed=True):
    """Complex E(w), H(w) of a probe recording on the positive-w axis.

    Zero-padded to at least ``pad_factor`` times the duration (and to the
    requested resolution), no window; the recording must have decayed.  The
    returned H is phase-corrected for the Yee half-step lag, i.e. referred
    to the same sample times as E.
    """
    if require_decayed:
        check_decayed(recording.e, "probe E series")
    nfft = _padded_length(len(recording.e), recording.dt_sample,
                          min_resolution, pad_factor)
    omega = 2.0 * np.pi * np.fft.rfftfreq(nfft, recording.dt_sample)
    e_spec = np.conj(np.fft.rfft(recording.e, nfft)) * recording.dt_sample
    h_spec = np.conj(np.fft.rfft(recording.h, nfft)) * recording.dt_sample
    h_spec *= np.exp(-1j * omega * recording.dt_stagger)
    return omega, e_spec, h_spec


def _flux(e_spec, h_spec):
    return 0.5 * np.real(e_spec * np.conj(h_spec))


def transmission_reflection(main_transmit: ProbeRecording,
                            main_reflect: ProbeRecording,
                            vacuum_transmit: ProbeRecording,
                            reference: EmitterSpecies,
                            min_resolution=None, pad_factor=4) -> SpectrumResult:
    """Normalized T/R/extinction spectra from a main and a vacuum run.

    The vacuum run's transmit-probe flux is the incident normalization; the
    reflect probe sits in the scattered-field region and carries only the
    reflected wave.  Values are meaningful on the band mask (incident power
    >= 1e-4 of its peak).
    """
    if abs(main_transmit.dt_sample - vacuum_transmit.dt_sample) > 1e-30:
        raise SourceBandMismatchError("main and vacuum runs sampled differently")
    if min_resolution is None:
        min_resolution = reference.gamma / 8.0

    nsamp = max(len(main_transmit.e), len(vacuum_transmit.e))
    nfft = _padded_length(nsamp, main_transmit.dt_sample, min_resolution,
                          pad_factor)

    def spec(rec, check=True):
        if check:
            check_decayed(rec.e, f"probe at cell {rec.cell}")
        omega = 2.0 * np.pi * np.fft.rfftfreq(nfft, rec.dt_sample)
        es = np.conj(np.fft.rfft(rec.e, nfft)) * rec.dt_sample
        hs = np.conj(np.fft.rfft(rec.h, nfft)) * rec.dt_sample
        hs *= np.exp(-1j * omega * rec.dt_stagger)
        return omega, es, hs

    omega, e_tr, h_tr = spec(main_transmit)
    _, e_rf, h_rf = spec(main_reflect)
    _, e_in, h_in = spec(vacuum_transmit)

    s_inc = _flux(e_in, h_in)
    s_tr = _flux(e_tr, h_tr)
    s_rf = _flux(e_rf, h_rf)

    peak = float(np.max(s_inc))
    if peak <= 0.0:
        raise SourceBandMismatchError("incident spectrum carries no power")
    mask = (s_inc >= BAND_POWER_FLOOR * peak) & (omega > 0)
    if not np.any(mask):
        raise SourceBandMismatchError("incident spectrum carries no band power")

    with np.errstate(divide="ignore", invalid="ignore"):
        T = np.where(mask, s_tr / s_inc, 0.0)
        R = np.where(mask, -s_rf / s_inc, 0.0)
    return SpectrumResult.from_arrays(omega, T, R, reference, band_mask=mask)


def chi_from_recording(e_slab, p_slab, dt_sample, pad_factor=4,
                       min_resolution=None):
    """Susceptibility P(w)/(eps0 E(w)) from co-located in-slab E and P series."""
    check_decayed(e_slab, "in-slab E series")
    nfft = _padded_length(len(e_slab), dt_sample, min_resolution, pad_factor)
    omega = 2.0 * np.pi * np.fft.rfftfreq(nfft, dt_sample)
    e_spec = np.conj(np.fft.rfft(e_slab, nfft))
    p_spec = np.conj(np.fft.rfft(p_slab, nfft))
    with np.errstate(divide="ignore", invalid="ignore"):
        chi = p_spec / (CONSTANTS.eps0 * e_spec)
    return omega, chi, np.abs(e_spec)


@dataclass
class LorentzFit:
    center: float
    halfwidth: float
    amplitude: float
    baseline: float
    covariance: np.ndarray
    residual: float


def _lorentz(x, x0, w, a, b):
    return a * w**2 / ((x - x0) ** 2 + w**2) + b


def fit_lorentzian(x, y, p0=None, max_evals=20000,
                   residual_limit=0.25) -> LorentzFit:
    """Least-squares Lorentzian a w^2/((x-x0)^2+w^2) + b on sampled data.

    Raises FitFailedError on non-convergence or when the relative rms
    residual exceeds ``residual_limit`` (multi-peaked input, misuse).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if p0 is None:
        b0 = float(np.min(y))
        a0 = float(np.max(y) - b0)
        x0 = float(x[np.argmax(y)])
        above = x[y > b0 + a0 / 2.0]
        w0 = max((above.max() - above.min()) / 2.0, (x[1] - x[0])) if len(above) else 1.0
        p0 = (x0, w0, a0, b0)
    try:
        popt, pcov = curve_fit(_lorentz, x, y, p0=p0, maxfev=max_evals)
    except RuntimeError as exc:
        raise FitFailedError(f"line fit did not converge: {exc}") from exc
    resid = y - _lorentz(x, *popt)
    scale = float(np.max(y) - np.min(y)) or 1.0
    rel = float(np.sqrt(np.mean(resid**2))) / scale
    if rel > residual_limit:
        raise FitFailedError(
            f"line fit residual {rel:.3f} too large; data not single-peaked?",
            residual=rel)
    return LorentzFit(center=float(popt[0]), halfwidth=float(abs(popt[1])),
                      amplitude=float(popt[2]), baseline=float(popt[3]),
                      covariance=pcov, residual=rel)


def fit_absorbance_linewidth(spectrum: SpectrumResult) -> LorentzFit:
    """Line half-width from the absorbance -ln(T + R) on the band mask.

    The absorbance is the path-integrated line profile, so its fitted
    half-width is depth-independent; fitting the extinction 1 - T - R
    directly would broaden with optical depth.
    """
    delta, _, T, R, _ = spectrum.masked()
    absorbance = -np.log(np.clip(T + R, 1e-300, None))
    return fit_lorentzian(delta, absorbance)


def find_transparency(spectrum: SpectrumResult, omega_low: float,
                      omega_high: float, min_height: float = 0.02):
    """Interior transmission maximum between two resonances.

    Returns (omega_peak, fwhm, T_peak).  The peak location is the centroid
    of the above-half-maximum region (robust for asymmetric peaks); the
    FWHM comes from the interpolated half crossings.  Raises
    NoTransparencyError when no interior maximum stands above baseline.
    """
    m = spectrum.band_mask & (spectrum.omega > omega_low) & (spectrum.omega < omega_high)
    if np.count_nonzero(m) < 5:
        raise NoTransparencyError("no usable band between the resonances")
    omega = spectrum.omega[m]
    T = spectrum.T[m]
    i0 = int(np.argmax(T))
    T_peak = float(T[i0])
    baseline = float(np.percentile(T, 25))
    if i0 in (0, len(T) - 1):
        raise NoTransparencyError("transmission rises to the bracket edge; no interior peak")
    if T_peak < min_height or T_peak < 2.0 * baseline:
        raise NoTransparencyError(
            f"no transmission peak above baseline (peak {T_peak:.3g}, "
            f"baseline {baseline:.3g})")

    half = baseline + (T_peak - baseline) / 2.0
    iL = i0
    while iL > 0 and T[iL] > half:
        iL -= 1
    iR = i0
    while iR < len(T) - 1 and T[iR] > half:
        iR += 1

    def cross(i, j):
        if T[j] == T[i]:
            return omega[i]
        return omega[i] + (half - T[i]) * (omega[j] - omega[i]) / (T[j] - T[i])

    w_lo = cross(iL, iL + 1) if T[iL] <= half else omega[iL]
    w_hi = cross(iR - 1, iR) if T[iR] <= half else omega[iR]
    seg = slice(iL, iR + 1)
    weight = np.clip(T[seg] - half, 0.0, None)
    omega_peak = float(np.sum(omega[seg] * weight) / np.sum(weight))
    return omega_peak, float(w_hi - w_lo), T_peak


def group_delay(main_transmit: ProbeRecording,
                vacuum_transmit: ProbeRecording,
                energy_floor: float = 1e-6) -> float:
    """Energy-centroid delay of the transmitted flux against the vacuum run."""
    s_main = main_transmit.e * main_transmit.h
    s_vac = vacuum_transmit.e * vacuum_transmit.h
    e_main = float(np.sum(np.abs(s_main)))
    e_vac = float(np.sum(np.abs(s_vac)))
    if e_vac <= 0.0:
        raise OpaqueMediumError("vacuum reference carries no flux")
    if e_main * main_transmit.dt_sample < energy_floor * e_vac * vacuum_transmit.dt_sample:
        raise OpaqueMediumError(
            f"transmitted energy below {energy_floor:.1e} of incident")

    def centroid(rec, s):
        return float(np.sum(rec.times * s) / np.sum(s))

    return centroid(main_transmit, s_main) - centroid(vacuum_transmit, s_vac)


# ----------------------------------------------------------------------
# on-disk formats: spectrum CSV, pulse-spectra CSV, key=value metadata
# ----------------------------------------------------------------------

SPECTRUM_HEADER = "delta,omega,T,R,extinction"
PULSE_HEADER = "delta,omega,S_incident,S_transmitted,S_reflected"


def write_spectrum_csv(path, spectrum: SpectrumResult):
    """One row per masked frequency, 9 significant digits."""
    delta, omega, T, R, ext = spectrum.masked()
    with open(path, "w") as f:
        f.write(SPECTRUM_HEADER + "\n")
        for row in zip(delta, omega, T, R, ext):
            f.write(",".join(f"{v:.9g}" for v in row) + "\n")


def write_pulse_spectra_csv(path, delta, omega, s_inc, s_tr, s_rf):
    """Incident/transmitted/reflected pulse power spectra (incident-peak = 1)."""
    norm = float(np.max(s_inc)) or 1.0
    with open(path, "w") as f:
        f.write(PULSE_HEADER + "\n")
        for row in zip(delta, omega, s_inc / norm, s_tr / norm, s_rf / norm):
            f.write(",".join(f"{v:.9g}" for v in row) + "\n")


def read_spectrum_csv(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return data


def write_metadata(path, entries: dict):
    with open(path, "w") as f:
        for key in sorted(entries):
            f.write(f"{key}={entries[key]}\n")


def read_metadata(path) -> dict:
    out = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line and "=" in line:
                key, val = line.split("=", 1)
                out[key] = val
    return out
