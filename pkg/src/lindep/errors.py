"""Exception types shared across the package."""


class LindepError(Exception):
    """Base class for all package-specific errors."""


class DegenerateSeriesError(LindepError, ValueError):
    """A series (or residual) has zero variance or is otherwise unusable."""


class IllConditionedError(LindepError, ValueError):
    """A regression design is rank deficient or numerically ill conditioned."""


class InsufficientEffectiveSamplesError(LindepError, ValueError):
    """An effective degree of freedom is too small for the requested test."""

    def __init__(self, message, term_indices=None):
        super().__init__(message)
        self.term_indices = list(term_indices) if term_indices else []


class FitFailedError(LindepError, RuntimeError):
    """A time-series model fit did not converge to a stable/invertible model."""


class ConfigError(LindepError, ValueError):
    """Invalid experiment or CLI configuration."""


class IngestionError(LindepError, ValueError):
    """Malformed or unusable input data file."""
