"""Exception hierarchy shared by every gedsense module."""


class GedsenseError(Exception):
    """Base class for all library errors."""


class DomainError(GedsenseError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DegeneratePlanError(GedsenseError, ValueError):
    """A sub-band maps to zero DFT bins."""


class DegenerateInputError(GedsenseError, ValueError):
    """Input data makes the statistic undefined (e.g. an all-zero white band)."""


class ConvergenceError(GedsenseError, RuntimeError):
    """An iterative search ran out of iterations.

    ``best`` holds the best point found before giving up.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NonUnimodalError(GedsenseError, RuntimeError):
    """The coarse scan found more than one interior local maximum."""

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan


class InsufficientSamplesError(GedsenseError, ValueError):
    """A sample window is shorter than the sensing time requires."""


class ConfigError(GedsenseError, ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
