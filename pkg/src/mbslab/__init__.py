"""1D Maxwell-Bloch simulator for thin dense slabs of two-level emitters.

Submodules:

    constants   physical constants
    materials   emitter species, slab geometry, derived quantities
    analytic    closed-form susceptibility / slab spectra (the oracle)
    bloch       density-matrix dynamics with local-field drive
    engine      staggered-grid time-domain solver (TFSF source, Mur ends)
    spectra     probe series -> normalized spectra, fits, delays
    config      key=value scenario configuration
    presets     built-in scenarios
    runner      orchestration and artifact output
    cli         command-line interface
"""

from .constants import CONSTANTS, DIPOLE_ATOMIC_UNIT
from .materials import (
    EmitterSpecies,
    SlabMedium,
    density_from_shift,
    omega_from_detuning,
    reduced_detuning,
    total_decoherence,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "DIPOLE_ATOMIC_UNIT",
    "EmitterSpecies",
    "SlabMedium",
    "density_from_shift",
    "omega_from_detuning",
    "reduced_detuning",
    "total_decoherence",
    "__version__",
]
