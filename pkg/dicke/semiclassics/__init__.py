"""Single-sector semiclassical microcanonical observables."""

from dicke.semiclassics.integrals import JxWeight
from dicke.semiclassics.sector import (
    SectorCurve,
    TurningPoints,
    dos_sector,
    jx_sector,
    jz_sector,
    micro_beta_sector,
    sector_curve,
    sector_derivatives,
    turning_points,
)

__all__ = [
    "JxWeight",
    "SectorCurve",
    "TurningPoints",
    "turning_points",
    "dos_sector",
    "jz_sector",
    "jx_sector",
    "micro_beta_sector",
    "sector_curve",
    "sector_derivatives",
]
