"""Space-air-ground link propagation, capacity and waveform toolkit."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DomainError,
    OutOfRangeError,
    ResourceError,
    SaginError,
    UndefinedShareError,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DomainError",
    "OutOfRangeError",
    "ResourceError",
    "SaginError",
    "UndefinedShareError",
]
