"""Exception hierarchy for the library."""


class TunedBlasError(Exception):
    """Base class for all library errors."""


class ConfigurationError(TunedBlasError):
    """A device profile or library configuration value is invalid."""


class RangeError(TunedBlasError, IndexError):
    """A buffer access falls outside the allocated element range."""


class UsageError(TunedBlasError, ValueError):
    """A routine or kernel was called with inconsistent arguments."""


class ValidationError(UsageError):
    """A tuning configuration failed the constraint filter.

    Carries the list of violated constraints as ``violations``.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class SingularMatrixError(TunedBlasError, ArithmeticError):
    """A triangular solve hit an exact zero on a non-unit diagonal."""

    def __init__(self, index):
        super().__init__(f"singular matrix: zero diagonal element at index {index}")
        self.index = index


class TuningError(TunedBlasError):
    """Auto-tuning could not produce a usable configuration."""


class DbLookupError(TunedBlasError, LookupError):
    """The tuning database has no entry or default for the requested key."""


class ExperimentError(TunedBlasError):
    """A benchmark experiment could not be completed."""
