"""Exception types shared across the toolkit."""


class PillarKitError(Exception):
    """Base class for all toolkit errors."""


class InputDomainError(PillarKitError, ValueError):
    """An argument violates a documented precondition."""


class SolverFailureError(PillarKitError, RuntimeError):
    """A numerical routine could not converge; never returns a guess."""


class ResonanceNotFoundError(PillarKitError, RuntimeError):
    """No transmittance peak inside the requested search window."""


class WindowError(PillarKitError, RuntimeError):
    """A resonance peak is truncated by the edge of the search window."""


class DegenerateCavityError(PillarKitError, ValueError):
    """Both cavity mirrors are opaque; escape fractions are undefined."""


class NotAMirrorError(PillarKitError, ValueError):
    """Stack reflectance is too low to be treated as a cavity mirror."""


class RankDeficientFitError(PillarKitError, ValueError):
    """Fit data carries no usable diameter dependence."""


class InconsistentBudgetError(PillarKitError, ValueError):
    """Quality factors violate the loss-budget ordering (q_total <= q_2d)."""


class ConfigError(PillarKitError, ValueError):
    """Malformed run configuration or stack description file."""


class SweepError(PillarKitError, RuntimeError):
    """A diameter sweep aborted; carries the diameter that failed."""

    def __init__(self, diameter_um, message):
        super().__init__(f"sweep failed at d = {diameter_um:g} um: {message}")
        self.diameter_um = diameter_um
