"""Closed-form optical response of dense two-level slabs.

The medium model is the weak-field limit of the density-matrix dynamics in
``bloch``: each dipole species responds as a damped oscillator driven by the
local field E + P/(3 eps0).  For a single species with density shift
D = n0 mu01^2/(9 hbar eps0) and decoherence rate g the susceptibility is

    chi(w) = 6 w01 D / (w01^2 + g^2 - 2 w01 D - w^2 - 2i g w)

in the exp(-i w t) convention (Im chi >= 0 for a passive medium).  The
damping slot carries 2*g*w (and the small g^2 offset) because the coherence
amplitude decays at rate g, which puts the absorption half-width at g; the
local-field feedback red-shifts the resonance by D for D << w01.

Two overlapping species couple through the shared local field
E + (P + P')/(3 eps0); solving the pair of driven-oscillator equations for a
monochromatic field gives ``chi_mixture``.  The total polarization has an
interior zero whose position is set purely by the two (frequency, shift)
pairs — see ``transparency_frequency``.

Everything here is an independent oracle for the time-domain solver: same
medium parameters, closed-form frequency response.
"""

import numpy as np

from .constants import CONSTANTS
from .errors import DegenerateMediumError, DerivativeUnreliableError
from .materials import EmitterSpecies, SlabMedium
from .spectrum import SpectrumResult

__all__ = [
    "chi_single",
    "chi_mixture",
    "refractive_index",
    "transparency_frequency",
    "transparency_frequency_numeric",
    "reflection_window",
    "slab_amplitudes",
    "slab_spectra",
    "interface_reflectance",
    "group_index",
]


def _pole_polynomial(omega, s: EmitterSpecies):
    """Denominator polynomial f(w) of the single-species response, scaled by 1/D.

    f(w) = (w01^2 + g^2 - 2 w01 D - w^2 - 2i g w) / D
    """
    D = s.lorentz_shift()
    g = s.gamma
    w = np.asarray(omega, dtype=complex)
    return (s.omega01**2 + g**2 - 2.0 * s.omega01 * D - w**2 - 2.0j * g * w) / D


def chi_single(omega, s: EmitterSpecies):
    """Electric susceptibility of a single dense species.

    Returns exactly zero for a zero-density species (continuity of the
    D -> 0 limit).
    """
    w = np.asarray(omega, dtype=complex)
    if s.lorentz_shift() == 0.0:
        return np.zeros_like(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        return 6.0 * s.omega01 / _pole_polynomial(w, s)


def chi_mixture(omega, s: EmitterSpecies, s2: EmitterSpecies):
    """Susceptibility of two species coupled through the shared local field.

    Symmetric under species exchange.  Reduces to ``chi_single`` when either
    density vanishes.
    """
    if s.lorentz_shift() == 0.0:
        return chi_single(omega, s2)
    if s2.lorentz_shift() == 0.0:
        return chi_single(omega, s)
    if (s2.omega01, s2.n0) < (s.omega01, s.n0):
        s, s2 = s2, s  # canonical order: bit-identical under exchange
    w = np.asarray(omega, dtype=complex)
    f1 = _pole_polynomial(w, s)
    f2 = _pole_polynomial(w, s2)
    num = 6.0 * s2.omega01 * (f1 + 2.0 * s.omega01) + 6.0 * s.omega01 * (f2 + 2.0 * s2.omega01)
    return num / (f1 * f2 - 4.0 * (s.omega01 * s2.omega01))


def medium_chi(omega, medium: SlabMedium):
    """Susceptibility of a slab medium, dispatching on the species count."""
    if len(medium.species) == 1:
        return chi_single(omega, medium.species[0])
    return chi_mixture(omega, medium.species[0], medium.species[1])


def refractive_index(chi):
    """Complex refractive index sqrt(1 + chi), branch with Im n >= 0.

    The branch corresponds to a forward wave decaying in a passive medium.
    """
    n = np.sqrt(np.asarray(chi, dtype=complex) + 1.0)
    return np.where(n.imag >= 0.0, n, -n)


def transparency_frequency(s: EmitterSpecies, s2: EmitterSpecies) -> float:
    """Frequency where the two partial polarizations cancel (zero damping limit).

    Weighted mean of the squared transition frequencies with weights
    omega01 * shift; lies between the two transition frequencies and moves
    with the density ratio.  Exact zero of Re[chi_mixture] for zero damping.
    """
    if s.omega01 > s2.omega01:
        s, s2 = s2, s
    w1, w2 = s.omega01, s2.omega01
    a = w1 * s.lorentz_shift()
    b = w2 * s2.lorentz_shift()
    if a == 0.0 and b == 0.0:
        raise DegenerateMediumError("transparency frequency undefined for two empty species")
    if a == 0.0:
        return w1
    if b == 0.0:
        return w2
    return float(np.sqrt((a * w2**2 + b * w1**2) / (a + b)))


def transparency_frequency_numeric(s: EmitterSpecies, s2: EmitterSpecies,
                                   npoints: int = 4001, tol_rel: float = 1e-9) -> float:
    """Interior minimizer of |chi_mixture| between the two transitions.

    Dense presearch followed by golden-section refinement; the presearch is
    needed because |chi| is far from unimodal (a pole can sit between the
    transitions at unequal densities).
    """
    lo = min(s.omega01, s2.omega01)
    hi = max(s.omega01, s2.omega01)
    grid = np.linspace(lo, hi, npoints)
    vals = np.abs(chi_mixture(grid, s, s2))
    i0 = int(np.argmin(vals))
    a = grid[max(i0 - 1, 0)]
    b = grid[min(i0 + 1, npoints - 1)]

    def f(w):
        return abs(chi_mixture(w, s, s2))

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol_rel * hi:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return float(0.5 * (a + b))


def reflection_window(s: EmitterSpecies) -> tuple[float, float]:
    """Zero-damping edges of the total-reflection band.

    Lower edge: pole of Re[chi] at sqrt(w01^2 - 2 w01 D).  Upper edge:
    chi = -1 crossing at sqrt(w01^2 + 4 w01 D).  First order in D/w01 these
    are w01 - D and w01 + 2D, a window of width 3D.
    """
    D = s.lorentz_shift()
    w01 = s.omega01
    lo_sq = w01**2 - 2.0 * w01 * D
    if lo_sq <= 0.0:
        raise DegenerateMediumError(
            f"density shift {D:.3e} too large for transition at {w01:.3e}")
    return float(np.sqrt(lo_sq)), float(np.sqrt(w01**2 + 4.0 * w01 * D))


def slab_amplitudes(omega, medium: SlabMedium):
    """Complex transmission/reflection amplitudes of the uniform slab.

    Standard three-layer result for a film of index n(w) and thickness l
    between vacuum half-spaces at normal incidence, exp(-i w t) convention.
    The transmission amplitude is referenced to the slab input plane; divide
    by the vacuum propagator exp(i w l / c) for the excess response.
    """
    w = np.asarray(omega, dtype=float)
    n = refractive_index(medium_chi(w, medium))
    phi = n * w * medium.thickness / CONSTANTS.c
    r1 = (1.0 - n) / (1.0 + n)
    e2 = np.exp(2.0j * phi)
    den = 1.0 - r1**2 * e2
    r = r1 * (1.0 - e2) / den
    t = (1.0 - r1**2) * np.exp(1.0j * phi) / den
    return t, r


def slab_spectra(omega_grid, medium: SlabMedium) -> SpectrumResult:
    """Power transmission/reflection/extinction spectra of the slab."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    if omega_grid.ndim != 1 or np.any(np.diff(omega_grid) <= 0):
        raise DegenerateMediumError("omega grid must be strictly increasing")
    t, r = slab_amplitudes(omega_grid, medium)
    return SpectrumResult.from_arrays(
        omega_grid, np.abs(t) ** 2, np.abs(r) ** 2, medium.reference)


def interface_reflectance(omega, s: EmitterSpecies):
    """Reflectance of the semi-infinite medium, |(1-n)/(1+n)|^2 with n = Re[n].

    Envelope of the slab reflectance: n -> 0 gives total reflection.
    """
    n = refractive_index(chi_single(omega, s)).real
    return np.abs((1.0 - n) / (1.0 + n)) ** 2


def group_index(omega: float, medium: SlabMedium, rel_tol: float = 1e-6,
                max_halvings: int = 40) -> float:
    """Group index n + w dn/dw at a single frequency, n = Re[sqrt(1+chi)].

    dn/dw by central differences with step halving until two successive
    estimates agree to ``rel_tol`` relative.  Raises if the stencil never
    settles (pole in range) or hits non-finite values.
    """
    def n_re(w):
        return float(refractive_index(medium_chi(w, medium)).real)

    h = medium.reference.gamma / 100.0
    if h <= 0.0:
        h = abs(omega) * 1e-9
    prev = (n_re(omega + h) - n_re(omega - h)) / (2.0 * h)
    for _ in range(max_halvings):
        h *= 0.5
        cur = (n_re(omega + h) - n_re(omega - h)) / (2.0 * h)
        if not np.isfinite(cur):
            raise DerivativeUnreliableError(f"non-finite index derivative near {omega:.6e}")
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-300):
            return n_re(omega) + omega * cur
        prev = cur
    raise DerivativeUnreliableError(
        f"index derivative did not settle near {omega:.6e}; pole in stencil range?")
