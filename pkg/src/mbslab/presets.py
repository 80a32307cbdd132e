"""Built-in scenarios: a 400 nm slab probed through its resonance region.

Common stock: transition at 620 nm, dipole moment one atomic unit,
population decay 1e11 1/s, pure dephasing 1e12 1/s (gamma = 1.05e12 1/s).
Densities are stated as shift/gamma ratios and converted through
``density_from_shift``.  The broadband probe covers reduced detunings of
about -85 to +105 at the 1e-4 power floor; its peak coherence drive is
1e-3 gamma, far inside the linear regime.
"""

from .config import ScenarioConfig, normalize
from .constants import DIPOLE_ATOMIC_UNIT
from .errors import ConfigError

__all__ = ["PRESET_NAMES", "preset", "two_species_raw"]

WAVELENGTH = 620e-9
GAMMA_DECAY = 1e11
GAMMA_STAR = 1e12
THICKNESS = WAVELENGTH / 1.55  # 400 nm

_COMMON = {
    "thickness": repr(THICKNESS),
    "dz": "1e-9",
    "courant": "0.5",
    "species1.wavelength": repr(WAVELENGTH),
    "species1.mu01": repr(DIPOLE_ATOMIC_UNIT),
    "species1.Gamma": repr(GAMMA_DECAY),
    "species1.gamma_star": repr(GAMMA_STAR),
    "source.kind": "gaussian-pulse",
    "source.carrier_detuning": "10",
    "source.fwhm": "9.5e-14",
    "source.peak_drive_over_gamma": "1e-3",
}


def _single(ratio):
    raw = dict(_COMMON)
    raw["mode"] = "spectrum"
    raw["species1.shift_over_gamma"] = repr(ratio)
    return raw


def two_species_raw(shift1_over_gamma, shift2_over_gamma, splitting_over_gamma=50.0):
    """Raw config for a two-species slab with given shift ratios."""
    raw = dict(_COMMON)
    raw["mode"] = "spectrum"
    raw["species1.shift_over_gamma"] = repr(shift1_over_gamma)
    raw["species2.detuning_over_gamma"] = repr(splitting_over_gamma)
    raw["species2.mu01"] = repr(DIPOLE_ATOMIC_UNIT)
    raw["species2.Gamma"] = repr(GAMMA_DECAY)
    raw["species2.gamma_star"] = repr(GAMMA_STAR)
    raw["species2.shift_over_gamma"] = repr(shift2_over_gamma)
    return raw


def _raw_preset(name):
    if name == "fig2-low":
        return _single(0.05)
    if name == "fig2-mid":
        return _single(2.0)
    if name == "fig2-high":
        return _single(18.0)
    if name == "fig3":
        raw = _single(18.0)
        raw["mode"] = "analytic-only"
        return raw
    if name == "fig4":
        return two_species_raw(18.0, 18.0)
    if name == "fig4-uncoupled":
        raw = two_species_raw(18.0, 18.0)
        raw["uncoupled"] = "true"
        return raw
    if name == "fig5":
        raw = two_species_raw(18.0, 18.0)
        raw["mode"] = "pulse-delay"
        raw["source.carrier_detuning"] = "35"
        raw["source.fwhm"] = "5e-14"
        return raw
    raise ConfigError(
        f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}")


PRESET_NAMES = ("fig2-low", "fig2-mid", "fig2-high", "fig3", "fig4",
                "fig4-uncoupled", "fig5")


def preset(name: str) -> ScenarioConfig:
    """Fully specified configuration for one of the named scenarios."""
    return normalize(_raw_preset(name))
