"""Exceptions raised by the closure criterion pipeline."""
from typing import Optional


class ClosureError(Exception):
    """Base class for every error raised by this package."""


class InputError(ClosureError, ValueError):
    """Malformed argument: dimension mismatch, odd grid, too-short trace."""


class ValidationError(InputError):
    """A value violates a domain invariant (signs vs index, curvature count, period)."""


class NumericError(ClosureError, ArithmeticError):
    """Non-finite value produced during evaluation or integration."""

    def __init__(self, message: str, s: Optional[float] = None):
        if s is not None:
            message = f"{message} (at s={s!r})"
        super().__init__(message)
        self.s = s
