"""Scenario configuration: flat key=value files, normalized to SI.

A raw config may use convenience keys (wavelength instead of omega01,
shift_over_gamma instead of n0, carrier_detuning instead of carrier, a peak
drive in units of gamma instead of a field amplitude).  ``normalize``
resolves everything to absolute SI quantities; ``serialize`` writes the
canonical SI-only form, which parses back to an identical config.

Recognized keys (speciesN with N = 1, 2):

    mode                       spectrum | pulse-delay | analytic-only
    thickness                  slab thickness [m]
    dz, courant, duration      grid cell [m], Courant number, run time [s]
    decimation                 probe decimation (int, or auto)
    uncoupled                  true: per-species runs, no cross coupling
    speciesN.omega01           transition frequency [rad/s]
    speciesN.wavelength        alternative to omega01 [m]
    speciesN.detuning_over_gamma  alternative: omega01 relative to species1
    speciesN.mu01              dipole moment [C m]
    speciesN.Gamma             population decay [1/s]
    speciesN.gamma_star        pure dephasing [1/s]
    speciesN.n0                number density [1/m^3]
    speciesN.shift_over_gamma  alternative: density shift in units of gamma
    source.kind                gaussian-pulse | cw-ramp
    source.carrier             carrier [rad/s]
    source.carrier_detuning    alternative: carrier as reduced detuning
    source.fwhm                field-envelope FWHM [s] (pulses)
    source.ramp_time           turn-on time [s] (cw)
    source.peak_e              peak field [V/m]
    source.peak_drive_over_gamma  alternative: peak coherence drive / gamma
"""

from dataclasses import dataclass, replace

import numpy as np

from .constants import CONSTANTS
from .errors import ConfigError
from .materials import EmitterSpecies, density_from_shift

__all__ = ["ScenarioConfig", "normalize", "parse_config", "serialize", "load_config"]

MODES = ("spectrum", "pulse-delay", "analytic-only")


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully normalized scenario description (SI units throughout)."""

    mode: str
    thickness: float
    species: tuple[EmitterSpecies, ...]
    dz: float
    courant: float
    duration: float
    source_kind: str
    carrier: float
    peak_e: float
    fwhm: float = 0.0
    ramp_time: float = 0.0
    decimation: int = 0  # 0 = choose from the sampling rule at run time
    uncoupled: bool = False

    @property
    def reference(self) -> EmitterSpecies:
        return self.species[0]

    def override(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)


def _get_float(raw, key, default=None):
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}", field=key)
        return default
    try:
        return float(raw[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key {key!r} is not a number: {raw[key]!r}", field=key) from exc


def _species_from_raw(raw, n, reference=None):
    pre = f"species{n}."
    keys = {k for k in raw if k.startswith(pre)}
    if not keys:
        return None
    if pre + "omega01" in raw:
        omega01 = _get_float(raw, pre + "omega01")
    elif pre + "wavelength" in raw:
        omega01 = 2.0 * np.pi * CONSTANTS.c / _get_float(raw, pre + "wavelength")
    elif pre + "detuning_over_gamma" in raw and reference is not None:
        omega01 = (reference.omega01
                   + _get_float(raw, pre + "detuning_over_gamma") * reference.gamma)
    else:
        raise ConfigError(f"species {n}: need omega01, wavelength or "
                          "detuning_over_gamma", field=pre + "omega01")
    mu01 = _get_float(raw, pre + "mu01")
    Gamma = _get_float(raw, pre + "Gamma")
    gamma_star = _get_float(raw, pre + "gamma_star", 0.0)
    gamma = gamma_star + Gamma / 2.0
    if pre + "n0" in raw:
        n0 = _get_float(raw, pre + "n0")
    elif pre + "shift_over_gamma" in raw:
        if gamma <= 0:
            raise ConfigError(f"species {n}: shift_over_gamma needs gamma > 0",
                              field=pre + "shift_over_gamma")
        n0 = density_from_shift(_get_float(raw, pre + "shift_over_gamma") * gamma, mu01)
    else:
        raise ConfigError(f"species {n}: need n0 or shift_over_gamma",
                          field=pre + "n0")
    try:
        return EmitterSpecies(omega01=omega01, mu01=mu01, Gamma=Gamma,
                              gamma_star=gamma_star, n0=n0)
    except ValueError as exc:
        raise ConfigError(f"species {n}: {exc}", field=pre[:-1]) from exc


def normalize(raw: dict) -> ScenarioConfig:
    """Resolve a raw key=value mapping into an SI ScenarioConfig."""
    mode = str(raw.get("mode", "spectrum"))
    if mode not in MODES:
        raise ConfigError(f"mode {mode!r} not one of {MODES}", field="mode")

    s1 = _species_from_raw(raw, 1)
    if s1 is None:
        raise ConfigError("at least species1 must be configured", field="species1")
    s2 = _species_from_raw(raw, 2, reference=s1)
    species = (s1,) if s2 is None else (s1, s2)

    thickness = _get_float(raw, "thickness")
    if thickness <= 0:
        raise ConfigError("thickness must be positive", field="thickness")
    dz = _get_float(raw, "dz", 1e-9)
    courant = _get_float(raw, "courant", 0.5)
    if not 0.0 < courant <= 1.0:
        raise ConfigError(f"courant {courant} outside (0, 1]", field="courant")
    if s1.gamma > 0:
        duration = _get_float(raw, "duration", 8.0 / s1.gamma)
    else:
        duration = _get_float(raw, "duration")
    if duration <= 0:
        raise ConfigError("duration must be positive", field="duration")

    kind = str(raw.get("source.kind", "gaussian-pulse"))
    if "source.carrier" in raw:
        carrier = _get_float(raw, "source.carrier")
    elif "source.carrier_detuning" in raw:
        carrier = s1.omega01 + _get_float(raw, "source.carrier_detuning") * s1.gamma
    else:
        raise ConfigError("need source.carrier or source.carrier_detuning",
                          field="source.carrier")
    if "source.peak_e" in raw:
        peak_e = _get_float(raw, "source.peak_e")
    elif "source.peak_drive_over_gamma" in raw:
        # invert the drive rate: E = 3 hbar (x gamma) / mu01 of the reference
        x = _get_float(raw, "source.peak_drive_over_gamma")
        peak_e = 3.0 * CONSTANTS.hbar * x * s1.gamma / s1.mu01
    else:
        raise ConfigError("need source.peak_e or source.peak_drive_over_gamma",
                          field="source.peak_e")
    fwhm = _get_float(raw, "source.fwhm", 0.0)
    ramp = _get_float(raw, "source.ramp_time", 0.0)
    if kind == "gaussian-pulse" and fwhm <= 0:
        raise ConfigError("gaussian-pulse needs source.fwhm > 0", field="source.fwhm")
    if kind == "cw-ramp" and ramp <= 0:
        raise ConfigError("cw-ramp needs source.ramp_time > 0", field="source.ramp_time")
    if kind not in ("gaussian-pulse", "cw-ramp"):
        raise ConfigError(f"unknown source.kind {kind!r}", field="source.kind")

    decimation = int(_get_float(raw, "decimation", 0))
    uncoupled = str(raw.get("uncoupled", "false")).lower() in ("1", "true", "yes")

    return ScenarioConfig(mode=mode, thickness=thickness, species=species,
                          dz=dz, courant=courant, duration=duration,
                          source_kind=kind, carrier=carrier, peak_e=peak_e,
                          fwhm=fwhm, ramp_time=ramp, decimation=decimation,
                          uncoupled=uncoupled)


def serialize(cfg: ScenarioConfig) -> str:
    """Canonical SI-only key=value form; parses back to an equal config."""
    lines = [
        f"mode={cfg.mode}",
        f"thickness={cfg.thickness!r}",
        f"dz={cfg.dz!r}",
        f"courant={cfg.courant!r}",
        f"duration={cfg.duration!r}",
        f"source.kind={cfg.source_kind}",
        f"source.carrier={cfg.carrier!r}",
        f"source.peak_e={cfg.peak_e!r}",
        f"source.fwhm={cfg.fwhm!r}",
        f"source.ramp_time={cfg.ramp_time!r}",
        f"decimation={cfg.decimation}",
        f"uncoupled={str(cfg.uncoupled).lower()}",
    ]
    for i, sp in enumerate(cfg.species, start=1):
        lines += [
            f"species{i}.omega01={sp.omega01!r}",
            f"species{i}.mu01={sp.mu01!r}",
            f"species{i}.Gamma={sp.Gamma!r}",
            f"species{i}.gamma_star={sp.gamma_star!r}",
            f"species{i}.n0={sp.n0!r}",
        ]
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> dict:
    """key=value lines -> raw dict.  '#' starts a comment; blanks ignored."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, val = line.split("=", 1)
        raw[key.strip()] = val.strip()
    return raw


def load_config(path) -> ScenarioConfig:
    with open(path) as f:
        return normalize(parse_config(f.read()))
