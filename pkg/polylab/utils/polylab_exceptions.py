"""
Exception classes for polylab
"""

# Imports
# Standard Library Imports
from __future__ import annotations
from typing import Optional, Sequence, Tuple


class DomainError(ValueError):
    """Raised when an inverse temperature (or mgf argument) is outside the range
    where the environment law has finite exponential moments."""

    pass


class EnumerationSizeError(ValueError):
    """Raised when an exact enumeration would exceed its size guard."""

    pass


class MassError(ValueError):
    """Raised when a measure has total mass above one, or a unit-norm input is
    required and not provided."""

    pass


class ConfigValidationError(ValueError):
    """
    Raised when an experiment configuration is invalid

    :param field: Dotted path of the offending configuration key
    :type field: str
    :param message: Description of the problem
    :type message: str
    :param errors: All (field, message) problems found, when several fields fail
    :type errors: Optional[Sequence[Tuple[str, str]]]
    """

    def __init__(
        self,
        field: str,
        message: str,
        errors: Optional[Sequence[Tuple[str, str]]] = None,
    ):
        self.field = field
        self.message = message
        self.errors = list(errors) if errors else [(field, message)]
        super().__init__(
            "; ".join(f"{f}: {m}" for f, m in self.errors),
        )
