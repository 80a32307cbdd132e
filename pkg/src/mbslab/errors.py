"""Exception hierarchy shared across the simulator modules."""


class MBSlabError(Exception):
    """Base class for all simulator errors."""


class InvalidParameterError(MBSlabError, ValueError):
    """A physical parameter is out of its admissible range."""


class DegenerateMediumError(MBSlabError):
    """Medium parameters outside the validity of the dispersion model."""


class DerivativeUnreliableError(MBSlabError):
    """A numerical derivative stencil straddles a pole or failed to settle."""


class IntegratorInstabilityError(MBSlabError):
    """Density-matrix invariants broken beyond tolerance during a run."""

    def __init__(self, message, cell=None, step=None):
        super().__init__(message)
        self.cell = cell
        self.step = step


class DivergedSimulationError(MBSlabError):
    """Non-finite field values detected during time stepping."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class TruncationError(MBSlabError):
    """Probe recording not sufficiently decayed for spectral analysis."""


class SourceBandMismatchError(MBSlabError):
    """The incident spectrum carries no power on the requested band."""


class FitFailedError(MBSlabError):
    """Least-squares line fit did not converge or left a large residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NoTransparencyError(MBSlabError):
    """No interior transmission maximum above baseline was found."""


class OpaqueMediumError(MBSlabError):
    """Transmitted energy below threshold; no meaningful delay measurable."""


class ConfigError(MBSlabError):
    """Scenario configuration failed validation.

    ``field`` names the offending entry when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
