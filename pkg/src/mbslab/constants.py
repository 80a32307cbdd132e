"""Physical constants used throughout the simulator (SI units, CODATA 2018)."""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Vacuum electromagnetic constants and hbar.

    eps0 is derived from mu0 and c so that c**2 * eps0 * mu0 == 1 holds to
    round-off, which the field updates rely on.
    """

    c: float = 299792458.0            # vacuum light speed [m/s]
    mu0: float = 1.25663706212e-6     # vacuum permeability [H/m]
    hbar: float = 1.054571817e-34     # reduced Planck constant [J s]

    @property
    def eps0(self) -> float:
        """Vacuum permittivity [F/m]."""
        return 1.0 / (self.mu0 * self.c**2)

    @property
    def impedance(self) -> float:
        """Vacuum wave impedance sqrt(mu0/eps0) [ohm]."""
        return self.mu0 * self.c


CONSTANTS = PhysicalConstants()

C_LIGHT = CONSTANTS.c
MU0 = CONSTANTS.mu0
EPS0 = CONSTANTS.eps0
HBAR = CONSTANTS.hbar
ETA0 = CONSTANTS.impedance

# one atomic unit of electric dipole moment, e * a0 [C m]
DIPOLE_ATOMIC_UNIT = 8.4783536255e-30
