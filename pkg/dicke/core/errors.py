"""Exceptions raised by the Dicke thermodynamics library."""

from typing import Optional


class DickeError(Exception):
    """Base class for library errors."""


class DomainError(DickeError, ValueError):
    """Parameters, sectors or energies outside the domain of a formula."""


class NoTransitionError(DomainError):
    """The requested critical quantity does not exist for these parameters."""


class ConvergenceError(DickeError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        return f"{base} ({details})"


class PrecursorNotFoundError(ConvergenceError):
    """No finite-size precursor could be located on the scanned window."""
