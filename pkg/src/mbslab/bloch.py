"""Two-level density-matrix dynamics driven by the local field.

State per emitter: populations rho00/rho11 and the coherence rho01 split
into real/imaginary parts (u, v).  The full carrier is resolved (no
rotating-wave approximation); relaxation is Lindblad-form with population
decay Gamma on the excited state (fed back to the ground state, so the
trace is conserved) and total coherence damping gamma = gamma_star + Gamma/2.

Equations of motion, with drive(t) the field-to-coherence coupling rate:

    d(u)/dt     = -omega01 * v - gamma * u
    d(v)/dt     = +omega01 * u + drive * (rho11 - rho00) - gamma * v
    d(rho11)/dt = -2 * drive * v - Gamma * rho11
    d(rho00)/dt = +2 * drive * v + Gamma * rho11

The sign pairing of the drive with the dipole expectation 2*mu01*u is the
one for which a ground-state emitter polarizes along a static field and a
dense slab red-shifts; only the pairing is physical, either member alone is
convention.

The drive computed from the local field carries a weight 1/3:

    drive = mu01 * E_local / (3 * hbar)

With the dipole expectation P = 2 n0 mu01 u this normalizes the ensemble
oscillator strength so that the slab's exact weak-field susceptibility is
the closed form in ``analytic`` — resonance shift n0 mu01^2/(9 hbar eps0),
coupling frequency sqrt(6 omega01 shift), absorption half-width gamma.

Integrator: classical RK4 with the local field sampled at the step
endpoints and midpoint.
"""

import numpy as np
from numba import njit

from .constants import CONSTANTS
from .errors import IntegratorInstabilityError, InvalidParameterError
from .materials import EmitterSpecies

__all__ = [
    "DRIVE_WEIGHT",
    "GROUND_STATE",
    "DensityMatrixState",
    "bloch_derivative",
    "drive_rate",
    "local_field",
    "advance_cell",
    "polarization_of_cell",
    "check_state",
]

# weight of mu01 * E_local / hbar in the coherence drive (see module docstring)
DRIVE_WEIGHT = 1.0 / 3.0

TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9

# ground state |0>: rho00, rho11, Re rho01, Im rho01
GROUND_STATE = np.array([1.0, 0.0, 0.0, 0.0])


class DensityMatrixState:
    """Convenience view of one (rho00, rho11, u, v) vector."""

    __slots__ = ("vec",)

    def __init__(self, rho00=1.0, rho11=0.0, rho01_re=0.0, rho01_im=0.0):
        self.vec = np.array([rho00, rho11, rho01_re, rho01_im], dtype=float)

    @property
    def rho00(self):
        return self.vec[0]

    @property
    def rho11(self):
        return self.vec[1]

    @property
    def rho01_re(self):
        return self.vec[2]

    @property
    def rho01_im(self):
        return self.vec[3]

    @property
    def trace(self):
        return self.vec[0] + self.vec[1]


@njit(cache=True)
def _deriv(r00, r11, u, v, drive, w01, Gam, gam):
    du = -w01 * v - gam * u
    dv = w01 * u + drive * (r11 - r00) - gam * v
    dr11 = -2.0 * drive * v - Gam * r11
    dr00 = 2.0 * drive * v + Gam * r11
    return dr00, dr11, du, dv


@njit(cache=True)
def _rk4(r00, r11, u, v, drive0, drive1, drive2, w01, Gam, gam, dt):
    """One RK4 step; drive sampled at t, t+dt/2, t+dt."""
    a0, a1, a2, a3 = _deriv(r00, r11, u, v, drive0, w01, Gam, gam)
    b0, b1, b2, b3 = _deriv(r00 + 0.5 * dt * a0, r11 + 0.5 * dt * a1,
                            u + 0.5 * dt * a2, v + 0.5 * dt * a3,
                            drive1, w01, Gam, gam)
    c0, c1, c2, c3 = _deriv(r00 + 0.5 * dt * b0, r11 + 0.5 * dt * b1,
                            u + 0.5 * dt * b2, v + 0.5 * dt * b3,
                            drive1, w01, Gam, gam)
    d0, d1, d2, d3 = _deriv(r00 + dt * c0, r11 + dt * c1,
                            u + dt * c2, v + dt * c3,
                            drive2, w01, Gam, gam)
    sixth = dt / 6.0
    return (r00 + sixth * (a0 + 2.0 * (b0 + c0) + d0),
            r11 + sixth * (a1 + 2.0 * (b1 + c1) + d1),
            u + sixth * (a2 + 2.0 * (b2 + c2) + d2),
            v + sixth * (a3 + 2.0 * (b3 + c3) + d3))


def bloch_derivative(state, rabi, s: EmitterSpecies):
    """Right-hand side of the equations of motion for a given drive rate.

    ``rabi`` is the instantaneous coherence drive [rad/s]; callers that
    start from a field convert with ``drive_rate``.
    """
    vec = state.vec if isinstance(state, DensityMatrixState) else np.asarray(state, float)
    d = _deriv(vec[0], vec[1], vec[2], vec[3], rabi, s.omega01, s.Gamma, s.gamma)
    return np.array(d)


def drive_rate(s: EmitterSpecies, e_local):
    """Coherence drive rate for a species in a given local field [rad/s]."""
    return DRIVE_WEIGHT * s.mu01 * np.asarray(e_local) / CONSTANTS.hbar


def local_field(e_macroscopic, p_total):
    """Field driving the emitters: macroscopic E plus P/(3 eps0)."""
    return np.asarray(e_macroscopic) + np.asarray(p_total) / (3.0 * CONSTANTS.eps0)


def check_state(vec, cell=None, step=None):
    """Validate trace and positivity of one state vector."""
    r00, r11, u, v = vec
    if abs(r00 + r11 - 1.0) > TRACE_TOL:
        raise IntegratorInstabilityError(
            f"trace drifted to {r00 + r11:.12f}", cell=cell, step=step)
    if r11 < -POSITIVITY_TOL or r11 > 1.0 + POSITIVITY_TOL:
        raise IntegratorInstabilityError(
            f"excited population {r11:.3e} out of [0, 1]", cell=cell, step=step)
    if u * u + v * v > r00 * r11 + POSITIVITY_TOL:
        raise IntegratorInstabilityError(
            f"coherence magnitude {np.hypot(u, v):.3e} breaks positivity",
            cell=cell, step=step)


def advance_cell(state, rabi_begin, rabi_mid, rabi_end, dt, s: EmitterSpecies,
                 validate=True):
    """Advance one emitter by dt with RK4; drive rates at begin/mid/end.

    The step must resolve the carrier: omega01 * dt <= 0.2.
    """
    if s.omega01 * dt > 0.2:
        raise InvalidParameterError(
            f"time step {dt:.3e} too coarse for carrier {s.omega01:.3e}")
    vec = state.vec if isinstance(state, DensityMatrixState) else np.asarray(state, float)
    out = np.array(_rk4(vec[0], vec[1], vec[2], vec[3],
                        rabi_begin, rabi_mid, rabi_end,
                        s.omega01, s.Gamma, s.gamma, dt))
    if validate:
        check_state(out)
    if isinstance(state, DensityMatrixState):
        new = DensityMatrixState()
        new.vec = out
        return new
    return out


def polarization_of_cell(states, species):
    """Total and per-species polarization of one cell [C/m^2].

    P_s = 2 * n0 * mu01 * Re[rho01] for each species; the total is their sum.
    """
    partials = []
    for st, sp in zip(states, species):
        vec = st.vec if isinstance(st, DensityMatrixState) else np.asarray(st, float)
        partials.append(2.0 * sp.n0 * sp.mu01 * vec[2])
    return float(sum(partials)), partials
