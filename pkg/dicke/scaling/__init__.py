"""Finite-size scaling of critical precursors."""

from dicke.scaling.fit import PowerLawFit, fit_powerlaw, monotonicity_violations
from dicke.scaling.precursors import (
    DEFAULT_LADDER,
    Precursor,
    delta_e,
    delta_jz,
    find_precursor_jx,
    find_precursor_jz,
)

__all__ = [
    "DEFAULT_LADDER",
    "Precursor",
    "PowerLawFit",
    "delta_e",
    "delta_jz",
    "find_precursor_jx",
    "find_precursor_jz",
    "fit_powerlaw",
    "monotonicity_violations",
]
