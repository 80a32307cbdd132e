"""1D staggered-grid time-domain Maxwell propagator coupled to the emitters.

Layout: E_x on integer nodes i*dz at integer times n*dt, H_y on half nodes
(i+1/2)*dz at half times (n+1/2)*dt.  Update equations

    h[i] -= dt/(mu0 dz) * (e[i+1] - e[i])
    e[i] -= dt/(eps0 dz) * (h[i] - h[i-1]) + dP[i]/eps0

with the polarization increment dP of the slab cells as source term.

Coupling order per step: H update; predictor advance of all emitter states
over [t_n, t_n + dt] with the local field frozen at t_n; E update sourced by
the predicted polarization increment; corrector re-advance from the saved
states with the local field sampled at t_n, midpoint and t_n + dt; final
polarization from the corrected states.

The incident wave enters through a one-node total-field/scattered-field
correction pair.  The magnetic tap is synthesized from the electric tap in
the frequency domain using the exact dispersion relation of the discrete
vacuum scheme, sin(k dz/2) = sin(w dt/2)/S, so injection leaks into the
scattered region only at round-off.  Both grid ends carry first-order Mur
boundaries (exact at S = 1).
"""

import struct
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import analytic
from .bloch import DRIVE_WEIGHT, POSITIVITY_TOL, TRACE_TOL, _rk4
from .constants import CONSTANTS, ETA0
from .errors import (
    DivergedSimulationError,
    IntegratorInstabilityError,
    InvalidParameterError,
)
from .materials import SlabMedium

__all__ = [
    "Grid1D",
    "SourceSpec",
    "ProbeRecording",
    "Simulation",
    "source_waveform",
    "source_spectrum_magnitude",
    "source_band",
    "discrete_wavenumber",
    "vacuum_phase_error",
]

CHECKPOINT_MAGIC = b"MBSLABCK"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class Grid1D:
    """Uniform staggered grid.  courant = c dt / dz."""

    dz: float
    nz: int
    courant: float = 0.5
    slab_start: int = 0
    slab_cells: int = 0

    def __post_init__(self):
        if not 0.0 < self.courant <= 1.0:
            raise InvalidParameterError(f"courant number {self.courant} outside (0, 1]")
        if self.nz < 8:
            raise InvalidParameterError("grid too small")
        if self.slab_cells:
            if self.slab_start < 2 or self.slab_start + self.slab_cells > self.nz - 2:
                raise InvalidParameterError("slab must leave vacuum cells at both ends")

    @property
    def dt(self) -> float:
        return self.courant * self.dz / CONSTANTS.c

    @property
    def slab_range(self) -> tuple[int, int]:
        return self.slab_start, self.slab_start + self.slab_cells


@dataclass(frozen=True)
class SourceSpec:
    """Incident wave description.

    ``fwhm_duration`` is the FWHM of the electric-field envelope for
    gaussian pulses; ``ramp_time`` the raised-cosine turn-on time for CW.
    The pulse is centered 7 sigma after t = 0 so the truncated turn-on sits
    below 1e-10 of the peak.
    """

    kind: str
    carrier: float
    peak_e: float
    injection_cell: int
    fwhm_duration: float = 0.0
    ramp_time: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussian-pulse", "cw-ramp"):
            raise InvalidParameterError(f"unknown source kind {self.kind!r}")
        if self.kind == "gaussian-pulse" and self.fwhm_duration <= 0:
            raise InvalidParameterError("gaussian pulse needs fwhm_duration > 0")
        if self.kind == "cw-ramp" and self.ramp_time <= 0:
            raise InvalidParameterError("cw source needs ramp_time > 0")

    @property
    def sigma(self) -> float:
        return self.fwhm_duration / (2.0 * np.sqrt(2.0 * np.log(2.0)))

    @property
    def t_center(self) -> float:
        return 7.0 * self.sigma


def source_waveform(source: SourceSpec, t):
    """Incident E field at the injection node as a function of time."""
    t = np.asarray(t, dtype=float)
    if source.kind == "gaussian-pulse":
        tc = source.t_center
        env = np.exp(-((t - tc) ** 2) / (2.0 * source.sigma**2))
        return source.peak_e * env * np.cos(source.carrier * (t - tc))
    ramp = np.clip(t / source.ramp_time, 0.0, 1.0)
    env = 0.5 * (1.0 - np.cos(np.pi * ramp))
    return source.peak_e * env * np.cos(source.carrier * t)


def source_spectrum_magnitude(source: SourceSpec, omega):
    """|integral E(t) exp(-i w t) dt| of the gaussian pulse (closed form)."""
    if source.kind != "gaussian-pulse":
        raise InvalidParameterError("closed-form spectrum only for gaussian pulses")
    w = np.asarray(omega, dtype=float)
    s = source.sigma
    amp = source.peak_e * s * np.sqrt(np.pi / 2.0)
    return amp * (np.exp(-(s**2) * (w - source.carrier) ** 2 / 2.0)
                  + np.exp(-(s**2) * (w + source.carrier) ** 2 / 2.0))


def source_band(source: SourceSpec, power_floor: float = 1e-4):
    """Frequency interval where the incident spectral power >= floor * peak."""
    if source.kind == "gaussian-pulse":
        half = np.sqrt(-np.log(power_floor)) / source.sigma
        lo = max(source.carrier - half, 0.0)
        return lo, source.carrier + half
    return source.carrier, source.carrier


def source_support_steps(source: SourceSpec, dt: float) -> int:
    """Number of steps after which the incident wave is numerically zero."""
    if source.kind == "gaussian-pulse":
        return int(np.ceil((source.t_center + 8.5 * source.sigma) / dt))
    return -1  # never off


def discrete_wavenumber(omega, dz: float, dt: float):
    """Wavenumber of the discrete vacuum scheme: sin(k dz/2) = sin(w dt/2)/S."""
    omega = np.asarray(omega, dtype=float)
    s = np.sin(omega * dt / 2.0) / (CONSTANTS.c * dt / dz)
    return 2.0 * np.arcsin(np.clip(s, -1.0, 1.0)) / dz


def vacuum_phase_error(cells_per_wavelength: float, courant: float) -> float:
    """Relative phase velocity error |k_num - k| / k of the vacuum scheme."""
    kdz = 2.0 * np.pi / cells_per_wavelength
    wdt = courant * kdz
    knum_dz = 2.0 * np.arcsin(np.sin(wdt / 2.0) / courant)
    return abs(knum_dz - kdz) / kdz


def incident_taps(source: SourceSpec, dt: float, dz: float, courant: float,
                  nsteps: int):
    """Electric and magnetic tap series for the total-field injection.

    e_inc[n] = incident E at the injection node, time n dt.  h_inc[n] =
    incident H half a cell to the left, time (n+1/2) dt, synthesized per
    frequency bin with the discrete wavenumber so the pair is an exact
    right-moving solution of the discrete scheme (the discrete impedance is
    exactly eta0 for every propagating bin).
    """
    n_src = source_support_steps(source, dt)
    n_win = nsteps if n_src < 0 else min(n_src, nsteps)
    t = np.arange(n_win) * dt
    g = source_waveform(source, t)
    nfft = 1 << int(np.ceil(np.log2(max(2 * n_win, 16))))
    spec = np.fft.rfft(g, nfft)
    w = 2.0 * np.pi * np.fft.rfftfreq(nfft, dt)
    s_arg = np.sin(w * dt / 2.0) / courant
    propagating = np.abs(s_arg) <= 1.0
    kdz = 2.0 * np.arcsin(np.clip(s_arg, -1.0, 1.0))
    phase = np.exp(1j * (w * dt / 2.0 + kdz / 2.0))
    h = np.fft.irfft(np.where(propagating, spec * phase, 0.0), nfft)[:n_win] / ETA0
    # arrays only cover the active window; the kernel treats later steps as 0
    return np.ascontiguousarray(g), np.ascontiguousarray(h)


@dataclass
class ProbeRecording:
    """Decimated co-located field samples at one grid node.

    e[m] is E at time (m+1) * dt_sample; h[m] is the spatial average of the
    two adjacent half-nodes at time (m+1) * dt_sample - dt_stagger (the
    intrinsic half-step lag, undone in the frequency domain by the analysis).
    """

    cell: int
    dt_sample: float
    dt_stagger: float
    e: np.ndarray
    h: np.ndarray

    @property
    def times(self):
        return (np.arange(len(self.e)) + 1) * self.dt_sample


@njit(cache=True)
def _update_h(e, h, ch):
    for i in range(e.shape[0] - 1):
        h[i] -= ch * (e[i + 1] - e[i])


@njit(cache=True)
def _update_e(e, h, ce):
    for i in range(1, e.shape[0] - 1):
        e[i] -= ce * (h[i] - h[i - 1])


@njit(cache=True)
def _run_kernel(e, h, rho, ptot, ppart, pstar, dpol, el0_arr, eold_slab,
                w01s, Gams, gams, coupl, twonmu,
                slab0, ch, ce, inv3eps, inveps, mur_k, dz, dt,
                e_inc, h_inc, i_src,
                nsteps, step0,
                probe_idx, rec_e, rec_h,
                slab_probe, rec_slab_e, rec_slab_p,
                decim, mirror_cell, diag, check_every):
    """Advance the coupled system by nsteps.  Returns (status, step, cell).

    status 0: ok; 1: non-finite fields; 2: positivity broken; 3: trace
    drifted.  diag accumulates [max trace error, max positivity deficit,
    field-to-medium work].
    """
    nz = e.shape[0]
    ns = rho.shape[0]
    nslab = rho.shape[1]
    n_inc = e_inc.shape[0]
    nprobe = probe_idx.shape[0]
    nrec = rec_slab_e.shape[0]

    for n in range(nsteps):
        g = step0 + n

        # magnetic half-step and incident-field correction
        _update_h(e, h, ch)
        if g < n_inc:
            h[i_src - 1] += ch * e_inc[g]

        # local field at t_n, then predictor advance with it frozen
        for j in range(nslab):
            eold_slab[j] = e[slab0 + j]
            el0_arr[j] = eold_slab[j] + ptot[j] * inv3eps
            pj = 0.0
            for s in range(ns):
                d = coupl[s] * el0_arr[j]
                r0, r1, u, v = _rk4(rho[s, j, 0], rho[s, j, 1],
                                    rho[s, j, 2], rho[s, j, 3],
                                    d, d, d, w01s[s], Gams[s], gams[s], dt)
                pj += twonmu[s] * u
            pstar[j] = pj
            dpol[j] = pj - ptot[j]

        # electric update with polarization-current source, then boundaries
        e0_old = e[0]
        e1_old = e[1]
        em2_old = e[nz - 2]
        em1_old = e[nz - 1]
        _update_e(e, h, ce)
        work = 0.0
        for j in range(nslab):
            i = slab0 + j
            e[i] -= dpol[j] * inveps
            work += dpol[j] * 0.5 * (eold_slab[j] + e[i]) * dz
        diag[2] += work
        if g < n_inc:
            e[i_src] += ce * h_inc[g]
        e[0] = e1_old + mur_k * (e[1] - e0_old)
        e[nz - 1] = em2_old + mur_k * (e[nz - 2] - em1_old)
        if mirror_cell >= 0:
            e[mirror_cell] = 0.0

        # corrector: re-advance from the saved states with endpoint fields
        for j in range(nslab):
            el0 = el0_arr[j]
            el1 = e[slab0 + j] + pstar[j] * inv3eps
            elm = 0.5 * (el0 + el1)
            pj = 0.0
            for s in range(ns):
                r0, r1, u, v = _rk4(rho[s, j, 0], rho[s, j, 1],
                                    rho[s, j, 2], rho[s, j, 3],
                                    coupl[s] * el0, coupl[s] * elm, coupl[s] * el1,
                                    w01s[s], Gams[s], gams[s], dt)
                rho[s, j, 0] = r0
                rho[s, j, 1] = r1
                rho[s, j, 2] = u
                rho[s, j, 3] = v
                trace_err = abs(r0 + r1 - 1.0)
                if trace_err > diag[0]:
                    diag[0] = trace_err
                pos_def = u * u + v * v - r0 * r1
                if pos_def > diag[1]:
                    diag[1] = pos_def
                if trace_err > TRACE_TOL:
                    return 3, g, j
                if pos_def > POSITIVITY_TOL or r1 < -POSITIVITY_TOL or r1 > 1.0 + POSITIVITY_TOL:
                    return 2, g, j
                pp = twonmu[s] * u
                ppart[s, j] = pp
                pj += pp
            ptot[j] = pj

        # record probes after the full step (E at t_{g+1}, H at t_{g+1/2})
        if decim > 0 and (g + 1) % decim == 0:
            m = (g + 1) // decim - 1
            if m < nrec:
                for k in range(nprobe):
                    ip = probe_idx[k]
                    rec_e[k, m] = e[ip]
                    rec_h[k, m] = 0.5 * (h[ip - 1] + h[ip])
                if slab_probe >= 0:
                    rec_slab_e[m] = e[slab_probe]
                    rec_slab_p[m] = ptot[slab_probe - slab0]

        if check_every > 0 and (g + 1) % check_every == 0:
            tot = 0.0
            for i in range(nz):
                tot += e[i]
            for i in range(nz - 1):
                tot += h[i]
            if not np.isfinite(tot):
                return 1, g, -1

    return 0, step0 + nsteps - 1, -1


@njit(cache=True)
def _run_periodic(e, h, ch, ce, nsteps):
    """Vacuum leapfrog with periodic wrap (h[nz-1] sits between e[nz-1], e[0])."""
    nz = e.shape[0]
    for _ in range(nsteps):
        for i in range(nz - 1):
            h[i] -= ch * (e[i + 1] - e[i])
        h[nz - 1] -= ch * (e[0] - e[nz - 1])
        e[0] -= ce * (h[0] - h[nz - 1])
        for i in range(1, nz):
            e[i] -= ce * (h[i] - h[i - 1])


@njit(cache=True)
def _run_periodic_reverse(e, h, ch, ce, nsteps):
    """Exact algebraic inverse of one periodic leapfrog cycle, iterated."""
    nz = e.shape[0]
    for _ in range(nsteps):
        for i in range(nz - 1, 0, -1):
            e[i] += ce * (h[i] - h[i - 1])
        e[0] += ce * (h[0] - h[nz - 1])
        h[nz - 1] += ch * (e[0] - e[nz - 1])
        for i in range(nz - 2, -1, -1):
            h[i] += ch * (e[i + 1] - e[i])


class Simulation:
    """Coupled field/emitter state plus the stepping loop.

    Parameters
    ----------
    grid : Grid1D
    medium : SlabMedium or None
        None (or zero slab cells) runs pure vacuum.
    source : SourceSpec
    planned_steps : int
        Total steps the recordings are sized for; ``run`` may be called in
        several segments up to this total (checkpoint/restart keeps going).
    probe_cells : dict[str, int]
        Named probe nodes, each strictly inside the grid.
    decimation : int
        Record every this many steps.
    slab_probe : bool
        Also record E and P at the central slab cell (for susceptibility
        extraction).
    """

    def __init__(self, grid: Grid1D, medium, source: SourceSpec,
                 planned_steps: int, probe_cells=None, decimation: int = 1,
                 slab_probe: bool = False, mirror_cell: int = -1,
                 check_every: int = 1000):
        self.grid = grid
        self.medium = medium
        self.source = source
        self.planned_steps = int(planned_steps)
        self.decimation = int(decimation)
        self.mirror_cell = int(mirror_cell)
        self.check_every = int(check_every)
        self.probe_cells = dict(probe_cells or {})

        species = tuple(medium.species) if medium is not None else ()
        if medium is not None and grid.slab_cells == 0:
            raise InvalidParameterError("medium given but grid has no slab cells")
        self.species = species

        dt = grid.dt
        for sp in species:
            if sp.omega01 * dt > 0.2:
                raise InvalidParameterError(
                    f"dt {dt:.3e} does not resolve carrier {sp.omega01:.3e}")
            wp = sp.plasma_frequency()
            if wp * dt > 0.1:
                raise InvalidParameterError(
                    f"dt {dt:.3e} too coarse for coupling frequency {wp:.3e}")
        self._check_resolution()

        i_src = source.injection_cell
        if not 1 <= i_src < grid.nz - 1:
            raise InvalidParameterError("injection cell outside the grid interior")
        if grid.slab_cells and i_src >= grid.slab_start:
            raise InvalidParameterError("injection cell must lie left of the slab")
        for name, ip in self.probe_cells.items():
            if not 1 <= ip <= grid.nz - 2:
                raise InvalidParameterError(f"probe {name!r} too close to the boundary")

        nz = grid.nz
        ns = len(species)
        nslab = grid.slab_cells if ns else 0
        self.e = np.zeros(nz)
        self.h = np.zeros(nz - 1)
        self.rho = np.zeros((ns, nslab, 4))
        if ns:
            self.rho[:, :, 0] = 1.0  # everything starts in the ground state
        self.ptot = np.zeros(nslab)
        self.ppart = np.zeros((ns, nslab))
        self._pstar = np.zeros(nslab)
        self._dpol = np.zeros(nslab)
        self._el0 = np.zeros(nslab)
        self._eold = np.zeros(nslab)
        self.w01s = np.array([sp.omega01 for sp in species])
        self.Gams = np.array([sp.Gamma for sp in species])
        self.gams = np.array([sp.gamma for sp in species])
        self.coupl = np.array([DRIVE_WEIGHT * sp.mu01 / CONSTANTS.hbar for sp in species])
        self.twonmu = np.array([2.0 * sp.n0 * sp.mu01 for sp in species])

        self.step = 0
        self.diag = np.zeros(3)  # max trace err, max positivity deficit, work
        self.e_inc, self.h_inc = incident_taps(
            source, dt, grid.dz, grid.courant, self.planned_steps)

        nrec = self.planned_steps // self.decimation
        self._probe_names = sorted(self.probe_cells)
        self._probe_idx = np.array([self.probe_cells[k] for k in self._probe_names],
                                   dtype=np.int64)
        self._rec_e = np.zeros((len(self._probe_names), nrec))
        self._rec_h = np.zeros((len(self._probe_names), nrec))
        self.slab_probe_cell = (grid.slab_start + grid.slab_cells // 2
                                if (slab_probe and nslab) else -1)
        self._rec_slab_e = np.zeros(nrec if nrec else 1)
        self._rec_slab_p = np.zeros(nrec if nrec else 1)

    def _check_resolution(self):
        """dz must resolve the shortest in-medium wavelength over the band.

        The band maximum of Re[n] is taken as a high percentile rather than
        the pointwise maximum so that isolated poles of (nearly) lossless
        media do not demand unbounded resolution; grid-refinement checks
        cover what this heuristic admits.
        """
        if not self.species:
            return
        lo, hi = source_band(self.source)
        if hi <= lo:
            lo, hi = 0.8 * self.source.carrier, 1.2 * self.source.carrier
        wgrid = np.linspace(lo, hi, 2001)
        n_re = analytic.refractive_index(
            analytic.medium_chi(wgrid, self.medium)).real
        n_eff = max(float(np.percentile(n_re, 98)), 1.0)
        lam_min = 2.0 * np.pi * CONSTANTS.c / (wgrid[-1] * n_eff)
        if self.grid.dz > lam_min / 40.0:
            raise InvalidParameterError(
                f"dz {self.grid.dz:.3e} too coarse: shortest in-medium wavelength "
                f"{lam_min:.3e} needs dz <= {lam_min / 40.0:.3e}")

    @property
    def clock(self) -> float:
        return self.step * self.grid.dt

    def run(self, nsteps=None):
        """Advance by nsteps (default: the remainder of the planned run)."""
        if nsteps is None:
            nsteps = self.planned_steps - self.step
        if nsteps <= 0:
            return self
        g = self.grid
        status, step, cell = _run_kernel(
            self.e, self.h, self.rho, self.ptot, self.ppart,
            self._pstar, self._dpol, self._el0, self._eold,
            self.w01s, self.Gams, self.gams, self.coupl, self.twonmu,
            g.slab_start, g.dt / (CONSTANTS.mu0 * g.dz), g.dt / (CONSTANTS.eps0 * g.dz),
            1.0 / (3.0 * CONSTANTS.eps0), 1.0 / CONSTANTS.eps0,
            (g.courant - 1.0) / (g.courant + 1.0), g.dz, g.dt,
            self.e_inc, self.h_inc, self.source.injection_cell,
            nsteps, self.step,
            self._probe_idx, self._rec_e, self._rec_h,
            self.slab_probe_cell, self._rec_slab_e, self._rec_slab_p,
            self.decimation, self.mirror_cell, self.diag, self.check_every)
        self.step = step + 1
        if status == 1:
            raise DivergedSimulationError(
                f"non-finite fields at step {step}", step=step)
        if status == 2:
            raise IntegratorInstabilityError(
                f"positivity broken at cell {cell}, step {step}", cell=cell, step=step)
        if status == 3:
            raise IntegratorInstabilityError(
                f"trace drifted at cell {cell}, step {step}", cell=cell, step=step)
        return self

    def probe(self, name: str) -> ProbeRecording:
        """Recording at a named probe over the completed part of the run."""
        k = self._probe_names.index(name)
        nrec = self.step // self.decimation
        return ProbeRecording(
            cell=self.probe_cells[name],
            dt_sample=self.decimation * self.grid.dt,
            dt_stagger=self.grid.dt / 2.0,
            e=self._rec_e[k, :nrec].copy(),
            h=self._rec_h[k, :nrec].copy(),
        )

    def slab_recording(self):
        """(e, p) time series at the central slab cell, or None."""
        if self.slab_probe_cell < 0:
            return None
        nrec = self.step // self.decimation
        return (self._rec_slab_e[:nrec].copy(), self._rec_slab_p[:nrec].copy(),
                self.decimation * self.grid.dt)

    @property
    def max_trace_error(self) -> float:
        return float(self.diag[0])

    @property
    def max_positivity_deficit(self) -> float:
        return float(self.diag[1])

    @property
    def medium_work(self) -> float:
        """Accumulated field-to-medium work per unit area [J/m^2]."""
        return float(self.diag[2])

    def field_energy(self) -> float:
        """Instantaneous electromagnetic energy per unit area [J/m^2]."""
        g = self.grid
        return float(0.5 * CONSTANTS.eps0 * np.sum(self.e**2) * g.dz
                     + 0.5 * CONSTANTS.mu0 * np.sum(self.h**2) * g.dz)

    def injected_energy(self) -> float:
        """Time-integrated incident flux through the injection node [J/m^2]."""
        n = min(self.step, len(self.e_inc))
        return float(np.sum(self.e_inc[:n] ** 2) / ETA0 * self.grid.dt)

    # ------------------------------------------------------------------
    # checkpointing: versioned flat binary, little-endian float64 arrays
    # in declaration order (e, h, ptot, ppart, rho)
    # ------------------------------------------------------------------

    def save_checkpoint(self, path):
        head = struct.pack("<8sIQQQQd", CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
                           self.grid.nz, len(self.species),
                           self.grid.slab_cells if self.species else 0,
                           self.step, self.clock)
        with open(path, "wb") as f:
            f.write(head)
            for arr in (self.e, self.h, self.ptot, self.ppart, self.rho):
                f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())

    def load_checkpoint(self, path):
        with open(path, "rb") as f:
            head = f.read(struct.calcsize("<8sIQQQQd"))
            magic, version, nz, ns, nslab, step, _clock = struct.unpack(
                "<8sIQQQQd", head)
            if magic != CHECKPOINT_MAGIC or version != CHECKPOINT_VERSION:
                raise InvalidParameterError("not a checkpoint file of this version")
            if nz != self.grid.nz or ns != len(self.species) or (
                    ns and nslab != self.grid.slab_cells):
                raise InvalidParameterError("checkpoint does not match this grid")

            def read_into(arr):
                buf = f.read(arr.size * 8)
                arr[...] = np.frombuffer(buf, dtype="<f8").reshape(arr.shape)

            for arr in (self.e, self.h, self.ptot, self.ppart, self.rho):
                read_into(arr)
            self.step = step
        return self
