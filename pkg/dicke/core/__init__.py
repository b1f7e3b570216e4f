"""Core module: model parameters, errors, numerics, storage and configuration."""

from dicke.core.errors import (
    ConvergenceError,
    DickeError,
    DomainError,
    NoTransitionError,
    PrecursorNotFoundError,
)
from dicke.core.model import ModelParams, SectorId
from dicke.core.storage import SpectrumStore

__all__ = [
    "ModelParams",
    "SectorId",
    "SpectrumStore",
    "DickeError",
    "DomainError",
    "NoTransitionError",
    "ConvergenceError",
    "PrecursorNotFoundError",
]
