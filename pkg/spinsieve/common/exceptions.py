"""Exceptions raised by the spinsieve library.

The command line maps each class onto a stable exit code, see
``spinsieve.main.EXIT_CODES``.
"""


class SpinSieveError(Exception):
    """Base class for all library errors."""


class UsageError(SpinSieveError):
    """Invalid arguments, e.g. a weight of the wrong rank."""


class ConfigurationError(SpinSieveError):
    """Unsupported root system label or unresolvable configuration."""


class NotInOrbitError(SpinSieveError):
    """A vector that is not in the Weyl group orbit of rho."""


class DatasetError(SpinSieveError):
    """A dataset that could not be loaded or failed validation."""


class ConstantsError(SpinSieveError):
    """Missing or inconsistent string-counting constants."""

    def __init__(self, message: str, problems: list[str] | None = None):
        super().__init__(message)
        self.problems: list[str] = problems or []


class TruncationError(SpinSieveError):
    """A sieve search box was clipped where completeness is required."""
