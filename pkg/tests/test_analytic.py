"""Closed-form susceptibility, windows, transparency, slab spectra."""

import numpy as np
import pytest

from mbslab import analytic
from mbslab.constants import CONSTANTS, DIPOLE_ATOMIC_UNIT
from mbslab.errors import DegenerateMediumError, DerivativeUnreliableError
from mbslab.materials import EmitterSpecies, SlabMedium, density_from_shift

C = CONSTANTS.c
W01 = 2 * np.pi * C / 620e-9
GAMMA = 1e11
GSTAR = 1e12
G = GSTAR + GAMMA / 2
MU = DIPOLE_ATOMIC_UNIT
ELL = 400e-9


def species(shift_over_gamma, omega01=W01, Gamma=GAMMA, gamma_star=GSTAR):
    g = gamma_star + Gamma / 2
    return EmitterSpecies(omega01=omega01, mu01=MU, Gamma=Gamma,
                          gamma_star=gamma_star,
                          n0=density_from_shift(shift_over_gamma * g, MU))


def slab(*sp):
    return SlabMedium(thickness=ELL, z_start=0.0, species=sp)


S_HIGH = species(18.0)
S_SECOND = species(18.0, omega01=W01 + 50 * G)
DELTA = np.linspace(-80, 120, 8001)
OMEGA = W01 + DELTA * G


# ---------------------------------------------------------------- chi_single

def test_chi_vanishing_density():
    sp = species(0.0)
    assert np.all(analytic.chi_single(OMEGA, sp) == 0.0)


def test_chi_equals_minus_one_at_upper_edge_zero_damping():
    sp = species(18.0, Gamma=0.0, gamma_star=0.0)
    sp = EmitterSpecies(omega01=W01, mu01=MU, Gamma=0.0, gamma_star=0.0,
                        n0=density_from_shift(18 * G, MU))
    D = sp.lorentz_shift()
    w = np.sqrt(W01**2 + 4 * W01 * D)
    chi = analytic.chi_single(w, sp)
    assert abs(chi - (-1.0)) < 1e-10


def test_chi_red_shifted_opaque_band_at_high_density():
    chi = analytic.chi_single(OMEGA, S_HIGH)
    below = DELTA[chi.real <= -1.0]
    # an opaque band about three shifts wide, red of the bare resonance
    width = below.max() - below.min()
    assert 45 < width < 60
    assert below.min() < -15


def test_chi_passive_imaginary_part():
    chi = analytic.chi_single(OMEGA, S_HIGH)
    assert np.all(chi.imag >= 0.0)


def test_chi_decays_at_high_frequency():
    assert abs(analytic.chi_single(100 * W01, S_HIGH)) < 1e-3


def test_chi_pole_position_as_damping_vanishes():
    sp = EmitterSpecies(omega01=W01, mu01=MU, Gamma=0.0, gamma_star=1e6,
                        n0=density_from_shift(18 * G, MU))
    D = sp.lorentz_shift()
    w_pole = np.sqrt(W01**2 - 2 * W01 * D)
    assert abs(analytic.chi_single(w_pole, sp)) > 1e5


# --------------------------------------------------------------- chi_mixture

def test_mixture_exchange_symmetry():
    a = analytic.chi_mixture(OMEGA, S_HIGH, S_SECOND)
    b = analytic.chi_mixture(OMEGA, S_SECOND, S_HIGH)
    assert np.array_equal(a, b)


def test_mixture_decoupling_limit():
    weak = species(18e-6, omega01=W01 + 50 * G)
    mix = analytic.chi_mixture(OMEGA, S_HIGH, weak)
    single = analytic.chi_single(OMEGA, S_HIGH)
    keep = np.abs(DELTA - 50) > 2  # away from the weak resonance itself
    err = np.abs(mix - single)[keep] / np.max(np.abs(single))
    assert err.max() < 1e-4


def test_mixture_of_identical_halves_is_single():
    half1 = species(9.0)
    half2 = species(9.0)
    mix = analytic.chi_mixture(OMEGA, half1, half2)
    single = analytic.chi_single(OMEGA, S_HIGH)
    assert np.allclose(mix, single, rtol=1e-12, atol=0)


def test_mixture_pole_structure():
    # coupled-mode poles from the zero-damping condition
    # (delta + 18)(32 - delta) = -324: delta = -23.8 and +37.8
    absq = np.abs(analytic.chi_mixture(OMEGA, S_HIGH, S_SECOND)) ** 2
    lower = (DELTA > -60) & (DELTA < 0)
    upper = (DELTA > 20) & (DELTA < 50)
    assert -24.5 < DELTA[lower][np.argmax(absq[lower])] < -23.0
    assert 36.0 < DELTA[upper][np.argmax(absq[upper])] < 39.5


def test_mixture_fano_asymmetry_around_upper_pole():
    # interior zero at ~24.9 sits just below the pole at ~37.8: steep red flank
    chi = analytic.chi_mixture(OMEGA, S_HIGH, S_SECOND)
    a = np.abs(chi[np.argmin(np.abs(DELTA - 31.0))])
    b = np.abs(chi[np.argmin(np.abs(DELTA - 44.0))])
    assert a < 0.5 * b


def test_mixture_interior_minimum_near_transparency():
    wstar = analytic.transparency_frequency_numeric(S_HIGH, S_SECOND)
    inner = (OMEGA >= W01 + 10 * G) & (OMEGA <= S_SECOND.omega01 - 10 * G)
    chi_abs = np.abs(analytic.chi_mixture(OMEGA[inner], S_HIGH, S_SECOND))
    assert abs(analytic.chi_mixture(wstar, S_HIGH, S_SECOND)) <= chi_abs.min() * (1 + 1e-6)
    assert abs(analytic.chi_mixture(wstar, S_HIGH, S_SECOND)) < 0.2


# ------------------------------------------------------ transparency frequency

def test_transparency_equal_shifts_is_geometric_mean():
    wstar = analytic.transparency_frequency(S_HIGH, S_SECOND)
    assert wstar == pytest.approx(np.sqrt(W01 * S_SECOND.omega01), rel=1e-14)
    assert (wstar - W01) / G == pytest.approx(24.893, abs=0.01)


def test_transparency_single_species_limit():
    weak = species(0.0, omega01=W01 + 50 * G)
    assert analytic.transparency_frequency(S_HIGH, weak) == S_SECOND.omega01
    assert analytic.transparency_frequency(weak, S_HIGH) == S_SECOND.omega01


def test_transparency_stays_between_transitions_and_tracks_density():
    prev = np.inf
    for ratio in (0.25, 1.0, 4.0):
        s2 = species(18.0 * ratio, omega01=W01 + 50 * G)
        wstar = analytic.transparency_frequency(S_HIGH, s2)
        assert W01 <= wstar <= s2.omega01
        assert wstar < prev
        prev = wstar


def test_transparency_argument_order_irrelevant():
    a = analytic.transparency_frequency(S_HIGH, S_SECOND)
    b = analytic.transparency_frequency(S_SECOND, S_HIGH)
    assert a == b


def test_numeric_minimizer_matches_formula():
    for ratio in (0.25, 1.0, 4.0):
        s2 = species(18.0 * ratio, omega01=W01 + 50 * G)
        w_formula = analytic.transparency_frequency(S_HIGH, s2)
        w_numeric = analytic.transparency_frequency_numeric(S_HIGH, s2)
        assert abs(w_numeric - w_formula) < 0.2 * G


# ------------------------------------------------------------ reflection window

def test_window_collapses_without_density():
    lo, hi = analytic.reflection_window(species(1e-9))
    assert lo == pytest.approx(W01, rel=1e-9)
    assert hi == pytest.approx(W01, rel=1e-9)


def test_window_edges_exact():
    D = S_HIGH.lorentz_shift()
    lo, hi = analytic.reflection_window(S_HIGH)
    assert lo == pytest.approx(np.sqrt(W01**2 - 2 * W01 * D), rel=1e-10)
    assert hi == pytest.approx(np.sqrt(W01**2 + 4 * W01 * D), rel=1e-10)


def test_window_width_second_order_correction():
    D = S_HIGH.lorentz_shift()
    lo, hi = analytic.reflection_window(S_HIGH)
    ratio = (hi - lo) / (3 * D)
    x = D / W01  # 6.22e-3 for these parameters
    assert ratio == pytest.approx(0.996947, abs=2e-5)
    assert abs(ratio - 1.0) == pytest.approx(x / 2, rel=0.05)


def test_window_degenerate_density():
    heavy = EmitterSpecies(omega01=1e12, mu01=MU, Gamma=0.0, gamma_star=0.0,
                           n0=density_from_shift(1e12, MU))
    with pytest.raises(DegenerateMediumError):
        analytic.reflection_window(heavy)


# ----------------------------------------------------------------- slab spectra

def test_empty_slab_fully_transparent():
    spec = analytic.slab_spectra(OMEGA, slab(species(0.0)))
    assert np.allclose(spec.T, 1.0, atol=1e-14)
    assert np.allclose(spec.R, 0.0, atol=1e-14)


def test_lossless_slab_conserves_energy():
    lossless = EmitterSpecies(omega01=W01, mu01=MU, Gamma=0.0, gamma_star=0.0,
                              n0=density_from_shift(0.5 * G, MU))
    # probe outside the opaque band where n is real
    w = W01 + np.linspace(5, 100, 2000) * G
    spec = analytic.slab_spectra(w, slab(lossless))
    assert np.max(np.abs(spec.T + spec.R - 1.0)) < 1e-10


def test_high_density_slab_reflects_central_window():
    spec = analytic.slab_spectra(OMEGA, slab(S_HIGH))
    central = (DELTA >= 0) & (DELTA <= 20)
    assert spec.R[central].min() > 0.9
    assert spec.T[central].max() < 0.05


def test_slab_rejects_unsorted_grid():
    with pytest.raises(DegenerateMediumError):
        analytic.slab_spectra(OMEGA[::-1], slab(S_HIGH))


def test_interface_reflectance_values():
    empty = species(0.0)
    assert analytic.interface_reflectance(W01, empty) == pytest.approx(0.0, abs=1e-14)
    lossless = EmitterSpecies(omega01=W01, mu01=MU, Gamma=0.0, gamma_star=0.0,
                              n0=S_HIGH.n0)
    D = lossless.lorentz_shift()
    w_edge = np.sqrt(W01**2 + 4 * W01 * D)   # chi = -1, n = 0
    assert analytic.interface_reflectance(w_edge, lossless) == pytest.approx(1.0, abs=1e-6)
    w_n3 = np.sqrt(W01**2 - 2 * W01 * D - 0.75 * W01 * D)  # chi = +8, n = 3
    assert analytic.interface_reflectance(w_n3, lossless) == pytest.approx(0.25, abs=1e-6)


def test_interface_envelope_aligns_with_slab_extrema():
    spec = analytic.slab_spectra(OMEGA, slab(S_HIGH))
    r_int = analytic.interface_reflectance(OMEGA, S_HIGH)
    fringe = np.pi * C / ELL  # Fabry-Perot spacing of the thin film
    w_slab = OMEGA[np.argmax(spec.R)]
    w_env = OMEGA[np.argmax(r_int)]
    assert abs(w_slab - w_env) < fringe
    assert abs(OMEGA[np.argmin(spec.T)] - w_env) < fringe


# ------------------------------------------------------------------ group index

def test_group_index_vacuum():
    med = slab(species(0.0))
    assert analytic.group_index(W01, med) == pytest.approx(1.0, abs=1e-9)


def test_group_index_at_transparency():
    med = slab(S_HIGH, S_SECOND)
    wstar = analytic.transparency_frequency(S_HIGH, S_SECOND)
    ng = analytic.group_index(wstar, med)
    assert ng == pytest.approx(250.4, abs=2.0)


def test_group_index_step_halving_consistency():
    med = slab(S_HIGH, S_SECOND)
    wstar = analytic.transparency_frequency(S_HIGH, S_SECOND)
    a = analytic.group_index(wstar, med, rel_tol=1e-6)
    b = analytic.group_index(wstar, med, rel_tol=1e-9)
    assert a == pytest.approx(b, rel=1e-5)


def test_group_index_unreliable_at_pole():
    lossless = EmitterSpecies(omega01=W01, mu01=MU, Gamma=0.0, gamma_star=0.0,
                              n0=S_HIGH.n0)
    med = slab(lossless)
    D = lossless.lorentz_shift()
    w_pole = np.sqrt(W01**2 - 2 * W01 * D)
    with pytest.raises(DerivativeUnreliableError):
        analytic.group_index(w_pole, med)
