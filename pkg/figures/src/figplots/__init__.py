"""Figure scripts for the slab-simulator CSV outputs.

This package renders publication-style figures from the documented CSV
schemas only; it never imports the simulator.  See ``schema`` for the file
formats and ``plots`` for the figure builders.
"""

from .plots import PlotSpec, plot_spectra
from .schema import SchemaError, load_pulse_csv, load_response_csv, load_spectrum_csv

__version__ = "0.1.0"

__all__ = [
    "PlotSpec",
    "plot_spectra",
    "SchemaError",
    "load_spectrum_csv",
    "load_response_csv",
    "load_pulse_csv",
]
