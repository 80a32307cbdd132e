"""CSV schemas written by the simulator and strict loaders for them.

    spectrum.csv        delta,omega,T,R,extinction
    response.csv        delta,omega,chi_re,chi_im,n_re,n_im
    pulse_spectra.csv   delta,omega,S_incident,S_transmitted,S_reflected

Headers must match exactly; anything else is rejected so that a figure can
never silently render the wrong quantity.
"""

from pathlib import Path

import numpy as np

SPECTRUM_COLUMNS = ("delta", "omega", "T", "R", "extinction")
RESPONSE_COLUMNS = ("delta", "omega", "chi_re", "chi_im", "n_re", "n_im")
PULSE_COLUMNS = ("delta", "omega", "S_incident", "S_transmitted", "S_reflected")


class SchemaError(ValueError):
    """CSV header or content does not match the documented schema."""


def _load(path, columns):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    with open(path) as f:
        header = f.readline().strip()
    if header != ",".join(columns):
        raise SchemaError(
            f"{path}: header {header!r} does not match {','.join(columns)!r}")
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.size == 0:
        raise SchemaError(f"{path}: no data rows (empty band)")
    return np.atleast_1d(data)


def load_spectrum_csv(path):
    return _load(path, SPECTRUM_COLUMNS)


def load_response_csv(path):
    return _load(path, RESPONSE_COLUMNS)


def load_pulse_csv(path):
    return _load(path, PULSE_COLUMNS)
