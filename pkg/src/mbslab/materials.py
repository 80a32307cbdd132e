"""Emitter species and slab geometry, with all derived material quantities.

A species is a two-level dipole characterized by its transition frequency,
transition dipole moment, population decay rate, pure dephasing rate and
number density.  Everything else (total decoherence rate, density shift,
plasma frequency, reduced detuning) derives from those five numbers.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .constants import CONSTANTS
from .errors import DegenerateMediumError, InvalidParameterError

__all__ = [
    "EmitterSpecies",
    "SlabMedium",
    "total_decoherence",
    "density_from_shift",
    "reduced_detuning",
    "omega_from_detuning",
]


@dataclass(frozen=True)
class EmitterSpecies:
    """One two-level dipole species.

    Parameters
    ----------
    omega01 : float
        Transition angular frequency [rad/s].
    mu01 : float
        Transition dipole moment [C m].
    Gamma : float
        Excited-state population decay rate [1/s].
    gamma_star : float
        Pure dephasing rate [1/s].
    n0 : float
        Number density [1/m^3].  Zero is allowed (empty species).
    """

    omega01: float
    mu01: float
    Gamma: float
    gamma_star: float = 0.0
    n0: float = 0.0

    def __post_init__(self):
        if self.omega01 <= 0:
            raise InvalidParameterError(f"omega01 must be positive, got {self.omega01}")
        if self.mu01 <= 0:
            raise InvalidParameterError(f"mu01 must be positive, got {self.mu01}")
        if self.Gamma < 0 or self.gamma_star < 0 or self.n0 < 0:
            raise InvalidParameterError("rates and density must be non-negative")

    @property
    def gamma(self) -> float:
        """Total decoherence rate gamma_star + Gamma/2 [1/s]."""
        return self.gamma_star + self.Gamma / 2.0

    def lorentz_shift(self) -> float:
        """Density-induced resonance shift n0 mu01^2 / (9 hbar eps0) [rad/s]."""
        return self.n0 * self.mu01**2 / (9.0 * CONSTANTS.hbar * CONSTANTS.eps0)

    def plasma_frequency(self) -> float:
        """Coupling frequency sqrt(6 omega01 * shift) of the dipole ensemble [rad/s]."""
        return np.sqrt(6.0 * self.omega01 * self.lorentz_shift())

    def with_density(self, n0: float) -> "EmitterSpecies":
        return replace(self, n0=n0)


@dataclass(frozen=True)
class SlabMedium:
    """A uniform layer of emitters between vacuum half-spaces.

    The density profile is constant on [z_start, z_start + thickness] and
    exactly zero outside.
    """

    thickness: float
    z_start: float
    species: tuple[EmitterSpecies, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.thickness <= 0:
            raise InvalidParameterError(f"thickness must be positive, got {self.thickness}")
        if not isinstance(self.species, tuple):
            object.__setattr__(self, "species", tuple(self.species))
        if not 1 <= len(self.species) <= 2:
            raise InvalidParameterError("a slab carries one or two species")

    @property
    def z_end(self) -> float:
        return self.z_start + self.thickness

    @property
    def reference(self) -> EmitterSpecies:
        """Species whose (omega01, gamma) define the reduced-detuning axis."""
        return self.species[0]


def total_decoherence(species: EmitterSpecies) -> float:
    """Total decoherence rate gamma = gamma_star + Gamma/2 [1/s]."""
    return species.gamma


def density_from_shift(delta_target: float, mu01: float) -> float:
    """Number density producing a given density shift for dipole moment mu01.

    Inverse of ``EmitterSpecies.lorentz_shift``.
    """
    if mu01 <= 0:
        raise InvalidParameterError(f"mu01 must be positive, got {mu01}")
    if delta_target < 0:
        raise InvalidParameterError(f"shift target must be non-negative, got {delta_target}")
    return 9.0 * CONSTANTS.hbar * CONSTANTS.eps0 * delta_target / mu01**2


def reduced_detuning(omega, reference: EmitterSpecies):
    """Dimensionless detuning (omega - omega01) / gamma of the reference species."""
    g = reference.gamma
    if g <= 0:
        raise DegenerateMediumError("reduced detuning undefined for gamma = 0")
    return (np.asarray(omega) - reference.omega01) / g


def omega_from_detuning(delta, reference: EmitterSpecies):
    """Inverse of ``reduced_detuning``."""
    g = reference.gamma
    if g <= 0:
        raise DegenerateMediumError("reduced detuning undefined for gamma = 0")
    return reference.omega01 + np.asarray(delta) * g
