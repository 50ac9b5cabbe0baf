from .lattice import LatticePmf
from .polylab_exceptions import (
    DomainError,
    EnumerationSizeError,
    MassError,
    ConfigValidationError,
)

__all__ = [
    "LatticePmf",
    "DomainError",
    "EnumerationSizeError",
    "MassError",
    "ConfigValidationError",
]
