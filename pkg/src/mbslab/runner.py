"""Scenario orchestration: build runs, normalize spectra, write artifacts.

A spectrum scenario runs the slab and a vacuum reference on the identical
grid/source and normalizes fluxes against the reference.  The vacuum run is
kept only as long as the pulse needs to clear the probes, and is reused
across scenarios with the same grid and source within a process.

Artifacts per run directory:

    spectrum.csv        delta,omega,T,R,extinction  (masked rows)
    response.csv        delta,omega,chi_re,chi_im,n_re,n_im (analytic mode)
    pulse_spectra.csv   delta,omega,S_incident,S_transmitted,S_reflected
                        (pulse-delay mode, incident peak normalized to 1)
    metadata.txt        normalized config + run parameters, key=value
    summary.txt         derived observables, key=value (also printed)
"""

import time
from pathlib import Path

import numpy as np

from . import analytic, spectra
from .config import ScenarioConfig, serialize
from .constants import CONSTANTS
from .engine import Grid1D, Simulation, SourceSpec, source_band, source_support_steps
from .errors import ConfigError, FitFailedError, NoTransparencyError
from .materials import SlabMedium, reduced_detuning
from .spectrum import SpectrumResult

__all__ = ["run_scenario", "simulate_spectrum", "analytic_spectrum",
           "clear_vacuum_cache"]

REFLECT_CELL = 40
INJECTION_CELL = 80
SLAB_START = 140
TRANSMIT_OFFSET = 50
RIGHT_PAD = 70

_VACUUM_CACHE: dict = {}


def clear_vacuum_cache():
    _VACUUM_CACHE.clear()


def build_grid(cfg: ScenarioConfig) -> Grid1D:
    slab_cells = int(round(cfg.thickness / cfg.dz))
    if slab_cells < 4:
        raise ConfigError("slab thinner than four cells; decrease dz", field="dz")
    nz = SLAB_START + slab_cells + TRANSMIT_OFFSET + RIGHT_PAD
    return Grid1D(dz=cfg.dz, nz=nz, courant=cfg.courant,
                  slab_start=SLAB_START, slab_cells=slab_cells)


def build_source(cfg: ScenarioConfig) -> SourceSpec:
    return SourceSpec(kind=cfg.source_kind, carrier=cfg.carrier,
                      peak_e=cfg.peak_e, injection_cell=INJECTION_CELL,
                      fwhm_duration=cfg.fwhm, ramp_time=cfg.ramp_time)


def pick_decimation(cfg: ScenarioConfig, grid: Grid1D, source: SourceSpec) -> int:
    """Largest decimation keeping dt_sample <= pi/(4 * band top)."""
    if cfg.decimation > 0:
        return cfg.decimation
    _, hi = source_band(source)
    hi = max(hi, source.carrier)
    return max(1, int(np.pi / (4.0 * hi * grid.dt)))


def probe_cells(grid: Grid1D) -> dict:
    return {"reflect": REFLECT_CELL,
            "transmit": grid.slab_start + grid.slab_cells + TRANSMIT_OFFSET}


def _medium(cfg: ScenarioConfig, species=None) -> SlabMedium:
    return SlabMedium(thickness=cfg.thickness, z_start=SLAB_START * cfg.dz,
                      species=species if species is not None else cfg.species)


def _vacuum_reference(cfg, grid, source, decim, nsteps_main):
    """Vacuum run long enough for the pulse to clear the probes."""
    if source.kind == "gaussian-pulse":
        transit = int((grid.nz - source.injection_cell) / grid.courant)
        steps = min(nsteps_main,
                    int(1.15 * (source_support_steps(source, grid.dt) + transit)))
    else:
        steps = nsteps_main
    steps = max(steps // decim, 1) * decim
    key = (grid.dz, grid.nz, grid.courant, source, steps, decim)
    if key not in _VACUUM_CACHE:
        sim = Simulation(grid, None, source, planned_steps=steps,
                         probe_cells=probe_cells(grid), decimation=decim)
        sim.run()
        _VACUUM_CACHE[key] = sim
    return _VACUUM_CACHE[key]


def _run_main(cfg, grid, source, decim, nsteps, species=None):
    medium = _medium(cfg, species)
    sim = Simulation(grid, medium, source, planned_steps=nsteps,
                     probe_cells=probe_cells(grid), decimation=decim,
                     slab_probe=True)
    sim.run()
    return sim


def simulate_spectrum(cfg: ScenarioConfig):
    """Run the scenario and return (spectrum, info dict)."""
    grid = build_grid(cfg)
    source = build_source(cfg)
    decim = pick_decimation(cfg, grid, source)
    nsteps = max(1, int(round(cfg.duration / grid.dt)) // decim * decim)
    ref = cfg.reference

    t0 = time.time()
    vac = _vacuum_reference(cfg, grid, source, decim, nsteps)
    info = {"nz": grid.nz, "dt": grid.dt, "nsteps": nsteps, "decimation": decim}

    if cfg.uncoupled and len(cfg.species) == 2:
        # no cross coupling: each species alone, transmissions cascaded
        sims = [_run_main(cfg, grid, source, decim, nsteps, species=(sp,))
                for sp in cfg.species]
        parts = [spectra.transmission_reflection(
            s.probe("transmit"), s.probe("reflect"), vac.probe("transmit"),
            ref, min_resolution=ref.gamma / 8.0) for s in sims]
        T = parts[0].T * parts[1].T
        R = np.clip(parts[0].R + parts[0].T**2 * parts[1].R, 0.0, 1.0)
        spec = SpectrumResult.from_arrays(parts[0].omega, T, R, ref,
                                          band_mask=parts[0].band_mask)
        info["max_trace_error"] = max(s.max_trace_error for s in sims)
        info["max_positivity_deficit"] = max(s.max_positivity_deficit for s in sims)
        main = sims[0]
    else:
        main = _run_main(cfg, grid, source, decim, nsteps)
        spec = spectra.transmission_reflection(
            main.probe("transmit"), main.probe("reflect"), vac.probe("transmit"),
            ref, min_resolution=ref.gamma / 8.0)
        info["max_trace_error"] = main.max_trace_error
        info["max_positivity_deficit"] = main.max_positivity_deficit
        info["chi_recording"] = main.slab_recording()
        info["energy"] = _energy_audit(main, spec, vac)

    info["runtime_s"] = time.time() - t0
    info["main"] = main
    info["vacuum"] = vac
    return spec, info


def _energy_audit(main, spec, vac):
    """Injected vs transmitted + reflected + medium work + residual field."""
    def flux_energy(rec):
        # cross-Parseval for one-sided spectra: int e h dt = (1/pi) int Re[E H*] dw
        omega, es, hs = spectra.power_spectrum(rec, require_decayed=False)
        dw = omega[1] - omega[0]
        return float(np.sum(np.real(es * np.conj(hs))) * dw / np.pi)

    injected = main.injected_energy()
    transmitted = flux_energy(main.probe("transmit"))
    reflected = -flux_energy(main.probe("reflect"))
    work = main.medium_work
    residual = main.field_energy()
    closure = injected - (transmitted + reflected + work + residual)
    return {"injected": injected, "transmitted": transmitted,
            "reflected": reflected, "absorbed": work, "residual": residual,
            "closure_rel": closure / injected if injected else 0.0}


def analytic_spectrum(cfg: ScenarioConfig, delta_step: float = 1.0 / 16.0):
    """Closed-form spectra over the source band on a reduced-detuning grid."""
    source = build_source(cfg)
    lo, hi = source_band(source)
    ref = cfg.reference
    lo = min(lo, ref.omega01 - 5 * ref.gamma)
    d_lo = float(reduced_detuning(lo, ref))
    d_hi = float(reduced_detuning(hi, ref))
    delta = np.arange(d_lo, d_hi, delta_step)
    omega = ref.omega01 + delta * ref.gamma
    medium = _medium(cfg)
    if cfg.uncoupled and len(cfg.species) == 2:
        part = [analytic.slab_spectra(omega, _medium(cfg, species=(sp,)))
                for sp in cfg.species]
        T = part[0].T * part[1].T
        R = np.clip(part[0].R + part[0].T**2 * part[1].R, 0.0, 1.0)
        return SpectrumResult.from_arrays(omega, T, R, ref)
    return analytic.slab_spectra(omega, medium)


def _window_crossings(spec: SpectrumResult, level: float = 0.5):
    """Outermost crossings of R through `level` on the band mask."""
    d, _, _, R, _ = spec.masked()
    above = R >= level
    if not np.any(above):
        return None
    idx = np.where(np.diff(above.astype(int)) != 0)[0]
    crossings = []
    for i in idx:
        frac = (level - R[i]) / (R[i + 1] - R[i])
        crossings.append(d[i] + frac * (d[i + 1] - d[i]))
    if len(crossings) < 2:
        return None
    return min(crossings), max(crossings)


def _measured_chi_minimum(info, cfg):
    """Reduced detuning of the measured |chi| minimum between the resonances."""
    rec = info.get("chi_recording")
    if rec is None or len(cfg.species) != 2:
        return None
    es, ps, dts = rec
    omega, chi, emag = spectra.chi_from_recording(es, ps, dts)
    w1 = min(sp.omega01 for sp in cfg.species)
    w2 = max(sp.omega01 for sp in cfg.species)
    m = (omega > w1) & (omega < w2) & (emag > 1e-3 * emag.max())
    if not np.any(m):
        return None
    i0 = int(np.argmin(np.abs(chi[m])))
    return float(reduced_detuning(omega[m][i0], cfg.reference))


def _summarize_spectrum(cfg, spec, info):
    ref = cfg.reference
    g = ref.gamma
    d, _, T, R, ext = spec.masked()
    out = {
        "max_T": float(np.max(T)),
        "max_R": float(np.max(R)),
        "max_T_plus_R": float(np.max(T + R)),
        "min_extinction": float(np.min(ext)),
    }

    ana = analytic_spectrum(cfg)
    Ta = np.interp(spec.omega[spec.band_mask], ana.omega, ana.T)
    Ra = np.interp(spec.omega[spec.band_mask], ana.omega, ana.R)
    inside = (d > ana.delta[0]) & (d < ana.delta[-1])
    out["oracle_max_dT"] = float(np.max(np.abs(T - Ta)[inside]))
    out["oracle_max_dR"] = float(np.max(np.abs(R - Ra)[inside]))

    if len(cfg.species) == 1:
        sp = cfg.species[0]
        try:
            fit = spectra.fit_absorbance_linewidth(spec)
            out["line_halfwidth_over_gamma"] = fit.halfwidth
            out["line_center_delta"] = fit.center
        except FitFailedError as exc:
            out["line_fit_error"] = str(exc)
        shift = sp.lorentz_shift()
        if shift > 0:
            lo_w, hi_w = analytic.reflection_window(sp)
            out["window_analytic_low_delta"] = float(reduced_detuning(lo_w, ref))
            out["window_analytic_high_delta"] = float(reduced_detuning(hi_w, ref))
            cross = _window_crossings(spec)
            if cross:
                out["window_measured_low_delta"] = cross[0]
                out["window_measured_high_delta"] = cross[1]
                out["window_width_over_gamma"] = cross[1] - cross[0]
                out["window_width_ratio_to_3shift"] = \
                    (cross[1] - cross[0]) * g / (3.0 * shift)
    elif not cfg.uncoupled:
        s1, s2 = cfg.species
        w_lo = min(s1.omega01, s2.omega01)
        w_hi = max(s1.omega01, s2.omega01)
        try:
            wpk, fwhm, tpk = spectra.find_transparency(spec, w_lo, w_hi)
            out["transparency_delta"] = float(reduced_detuning(wpk, ref))
            out["transparency_fwhm_over_gamma"] = fwhm / g
            out["transparency_T"] = tpk
        except NoTransparencyError as exc:
            out["transparency_error"] = str(exc)
        mask_inner = spec.band_mask & (spec.omega > w_lo) & (spec.omega < w_hi)
        if np.any(mask_inner):
            iR = np.argmin(np.where(mask_inner, spec.R, np.inf))
            out["reflection_min_delta"] = float(spec.delta[iR])
        out["wstar_formula_delta"] = float(reduced_detuning(
            analytic.transparency_frequency(s1, s2), ref))
        out["wstar_numeric_delta"] = float(reduced_detuning(
            analytic.transparency_frequency_numeric(s1, s2), ref))
        measured = _measured_chi_minimum(info, cfg)
        if measured is not None:
            out["wstar_measured_delta"] = measured
    else:
        s1, s2 = cfg.species
        m = (spec.omega > min(s1.omega01, s2.omega01) + 2 * g) & \
            (spec.omega < max(s1.omega01, s2.omega01) - 2 * g) & spec.band_mask
        if np.any(m):
            out["uncoupled_max_interior_T"] = float(np.max(spec.T[m]))

    for key in ("max_trace_error", "max_positivity_deficit", "runtime_s"):
        if key in info:
            out[key] = info[key]
    if "energy" in info:
        for k, v in info["energy"].items():
            out[f"energy_{k}"] = v
    return out


def simulate_pulse_delay(cfg: ScenarioConfig):
    """Pulse-delay mode: centroid delay of the transmitted flux + spectra."""
    grid = build_grid(cfg)
    source = build_source(cfg)
    decim = pick_decimation(cfg, grid, source)
    nsteps = max(1, int(round(cfg.duration / grid.dt)) // decim * decim)
    ref = cfg.reference

    t0 = time.time()
    vac = _vacuum_reference(cfg, grid, source, decim, nsteps)
    main = _run_main(cfg, grid, source, decim, nsteps)
    delay = spectra.group_delay(main.probe("transmit"), vac.probe("transmit"))

    spec = spectra.transmission_reflection(
        main.probe("transmit"), main.probe("reflect"), vac.probe("transmit"),
        ref, min_resolution=ref.gamma / 8.0)

    omega_m, e_in, h_in = spectra.power_spectrum(vac.probe("transmit"),
                                                 min_resolution=ref.gamma / 8.0)
    s_inc_full = 0.5 * np.real(e_in * np.conj(h_in))
    m = spec.band_mask
    s_inc = s_inc_full[m]
    s_tr = s_inc * spec.T[m]
    s_rf = s_inc * spec.R[m]

    # band-averaged prediction: group-index delay weighted by transmitted power
    medium = _medium(cfg)
    omega = spec.omega[m]
    n_re = analytic.refractive_index(analytic.medium_chi(omega, medium)).real
    ng = n_re + omega * np.gradient(n_re, omega)
    predicted = float(np.sum(s_tr * (ng - 1.0)) / np.sum(s_tr)
                      * cfg.thickness / CONSTANTS.c)

    info = {
        "nz": grid.nz, "dt": grid.dt, "nsteps": nsteps, "decimation": decim,
        "max_trace_error": main.max_trace_error,
        "max_positivity_deficit": main.max_positivity_deficit,
        "runtime_s": time.time() - t0,
        "main": main, "vacuum": vac,
        "pulse_spectra": (spec.delta[m], omega, s_inc, s_tr, s_rf),
    }
    summary = {
        "group_delay_s": delay,
        "predicted_delay_s": predicted,
        "delay_ratio_to_prediction": delay / predicted if predicted else np.inf,
        "transmitted_energy_fraction": float(np.sum(s_tr) / np.sum(s_inc)),
        "max_trace_error": main.max_trace_error,
        "max_positivity_deficit": main.max_positivity_deficit,
        "runtime_s": info["runtime_s"],
    }
    return spec, summary, info


def _metadata(cfg, info, source_tag):
    meta = {"source": source_tag, "format_version": "1"}
    for line in serialize(cfg).splitlines():
        key, val = line.split("=", 1)
        meta[f"config.{key}"] = val
    for key in ("nz", "dt", "nsteps", "decimation"):
        if key in info:
            meta[f"run.{key}"] = repr(info[key])
    meta["run.reflect_cell"] = REFLECT_CELL
    meta["run.injection_cell"] = INJECTION_CELL
    meta["run.slab_start_cell"] = SLAB_START
    return meta


def run_scenario(cfg: ScenarioConfig, outdir, quiet: bool = False,
                 preset_name: str = "") -> dict:
    """Execute a scenario and write its artifact set; returns the summary."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    if cfg.mode == "analytic-only":
        spec = analytic_spectrum(cfg)
        medium = _medium(cfg)
        chi = analytic.medium_chi(spec.omega, medium)
        n = analytic.refractive_index(chi)
        with open(outdir / "response.csv", "w") as f:
            f.write("delta,omega,chi_re,chi_im,n_re,n_im\n")
            for row in zip(spec.delta, spec.omega, chi.real, chi.imag,
                           n.real, n.imag):
                f.write(",".join(f"{v:.9g}" for v in row) + "\n")
        summary = {}
        if len(cfg.species) == 1 and cfg.species[0].lorentz_shift() > 0:
            sp = cfg.species[0]
            lo_w, hi_w = analytic.reflection_window(sp)
            summary["window_analytic_low_delta"] = float(
                reduced_detuning(lo_w, sp))
            summary["window_analytic_high_delta"] = float(
                reduced_detuning(hi_w, sp))
            summary["window_width_ratio_to_3shift"] = \
                (hi_w - lo_w) / (3.0 * sp.lorentz_shift())
        info = {}
    elif cfg.mode == "pulse-delay":
        spec, summary, info = simulate_pulse_delay(cfg)
        d, w, s_inc, s_tr, s_rf = info["pulse_spectra"]
        spectra.write_pulse_spectra_csv(outdir / "pulse_spectra.csv",
                                        d, w, s_inc, s_tr, s_rf)
    else:
        spec, info = simulate_spectrum(cfg)
        summary = _summarize_spectrum(cfg, spec, info)

    spectra.write_spectrum_csv(outdir / "spectrum.csv", spec)
    tag = "analytic" if cfg.mode == "analytic-only" else "fdtd"
    meta = _metadata(cfg, info, tag)
    if preset_name:
        meta["preset"] = preset_name
    spectra.write_metadata(outdir / "metadata.txt", meta)
    spectra.write_metadata(outdir / "summary.txt", summary)
    if not quiet:
        for key in sorted(summary):
            print(f"{key}={summary[key]}")
    return summary
