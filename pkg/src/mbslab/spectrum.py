"""Container for transmission/reflection/extinction spectra."""

from dataclasses import dataclass

import numpy as np

from .materials import EmitterSpecies, reduced_detuning


@dataclass
class SpectrumResult:
    """T/R/extinction on a frequency grid.

    ``delta`` is the reduced detuning of ``omega`` with respect to the
    reference species used to build the result.  ``band_mask`` flags the
    frequencies where the incident spectral power was large enough for the
    ratios to be meaningful (always all-True for closed-form spectra).
    """

    omega: np.ndarray
    delta: np.ndarray
    T: np.ndarray
    R: np.ndarray
    extinction: np.ndarray
    band_mask: np.ndarray

    @classmethod
    def from_arrays(cls, omega, T, R, reference: EmitterSpecies, band_mask=None):
        omega = np.asarray(omega, dtype=float)
        T = np.asarray(T, dtype=float)
        R = np.asarray(R, dtype=float)
        if band_mask is None:
            band_mask = np.ones(omega.shape, dtype=bool)
        if reference.gamma > 0:
            delta = np.asarray(reduced_detuning(omega, reference), dtype=float)
        else:
            delta = np.full(omega.shape, np.nan)  # axis undefined without a linewidth
        return cls(
            omega=omega,
            delta=delta,
            T=T,
            R=R,
            extinction=1.0 - T - R,
            band_mask=np.asarray(band_mask, dtype=bool),
        )

    def masked(self):
        """Return (delta, omega, T, R, extinction) restricted to the band mask."""
        m = self.band_mask
        return self.delta[m], self.omega[m], self.T[m], self.R[m], self.extinction[m]
