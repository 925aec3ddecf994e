"""Exception hierarchy shared by every module."""


class SaginError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SaginError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class OutOfRangeError(DomainError):
    """A frequency lies outside the coverage of a tabulated model."""


class ConfigError(SaginError, ValueError):
    """A scenario, population or waveform configuration is inconsistent."""


class ResourceError(SaginError, RuntimeError):
    """A computation would exceed a configured size cap."""


class UndefinedShareError(SaginError, ZeroDivisionError):
    """Layer shares were requested for a breakdown with no medium loss."""
