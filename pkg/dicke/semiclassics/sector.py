"""Semiclassical microcanonical observables of a single j-sector.

Valid for omega = omega0 = 1. Energies are absolute; internally every formula
depends on E/j and on the sector's effective coupling only.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from dicke.core.errors import DomainError
from dicke.core.model import (
    ModelParams,
    SectorId,
    effective_coupling,
    ground_energy_ratio,
    require_unit_frequencies,
)
from dicke.core.numerics import log_gradient
from dicke.core.utils import write_csv
from dicke.semiclassics.integrals import (
    JxWeight,
    discriminant,
    sector_ratios,
    turning_roots,
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["E_over_j", "rho", "jz_over_j", "jx_plus_over_j", "beta"]
DERIVATIVE_COLUMNS = ["drho_dE", "djz_dE"]


@dataclass(frozen=True)
class TurningPoints:
    """Classical turning points of the atomic inversion y = Jz/j."""

    y_minus: float
    y_plus: float


def _prepare(params: ModelParams, sector: SectorId) -> float:
    require_unit_frequencies(params)
    lam_eff = effective_coupling(params, sector)
    if sector.two_j == 0:
        raise DomainError("the j = 0 sector has no semiclassical phase space")
    return lam_eff


def _ratio(energy: float, sector: SectorId) -> float:
    return energy / sector.j


def turning_points(energy: float, sector: SectorId, params: ModelParams) -> TurningPoints:
    """Roots y_minus <= y_plus of y - E/j = 2 lam_eff^2 (1 - y^2)."""
    lam_eff = _prepare(params, sector)
    if lam_eff <= 0:
        raise DomainError("turning points need a positive coupling")
    e = _ratio(energy, sector)
    disc = float(discriminant(e, lam_eff))
    if disc < -1e-12:
        raise DomainError(
            f"energy below classical ground state: E/j={e:.6g}, "
            f"E_min/j={ground_energy_ratio(lam_eff):.6g}"
        )
    y_minus, y_plus = turning_roots(e, lam_eff)
    return TurningPoints(y_minus=float(y_minus), y_plus=float(y_plus))


def _single(
    energy: float,
    sector: SectorId,
    params: ModelParams,
    method: str,
    jx_weight: JxWeight = JxWeight.VERBATIM,
) -> tuple[float, float, float]:
    lam_eff = _prepare(params, sector)
    rho, jz, jx = sector_ratios(_ratio(energy, sector), lam_eff, method=method, jx_weight=jx_weight)
    return float(rho[0]) * sector.j, float(jz[0]), float(jx[0])


def dos_sector(
    energy: float, sector: SectorId, params: ModelParams, method: str = "adaptive"
) -> float:
    """Density of states rho(E, j); zero at or below the classical ground energy."""
    return _single(energy, sector, params, method)[0]


def _require_accessible(energy: float, sector: SectorId, params: ModelParams, rho: float):
    if rho <= 0 and _ratio(energy, sector) <= 1:
        lam_eff = effective_coupling(params, sector)
        raise DomainError(
            f"energy below classical ground state: E/j={_ratio(energy, sector):.6g}, "
            f"E_min/j={ground_energy_ratio(lam_eff):.6g}"
        )


def jz_sector(
    energy: float, sector: SectorId, params: ModelParams, method: str = "adaptive"
) -> float:
    """Microcanonical <Jz>/j of sector j."""
    rho, jz, _ = _single(energy, sector, params, method)
    _require_accessible(energy, sector, params, rho)
    return jz


def jx_sector(
    energy: float,
    sector: SectorId,
    params: ModelParams,
    branch: str = "+",
    method: str = "adaptive",
    jx_weight: JxWeight = JxWeight.VERBATIM,
) -> float:
    """<Jx>/j on one of the two parity-broken wells; zero above E/j = -1."""
    if branch not in ("+", "-"):
        raise ValueError(f"branch must be '+' or '-', got '{branch}'")
    rho, _, jx = _single(energy, sector, params, method, jx_weight)
    _require_accessible(energy, sector, params, rho)
    return jx if branch == "+" else -jx


@dataclass
class SectorCurve:
    """Tabulated sector observables on an increasing grid of E/j."""

    sector: SectorId
    energies: np.ndarray
    rho: np.ndarray
    jz_over_j: np.ndarray
    jx_over_j: np.ndarray
    beta: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        if self.energies.size > 1 and np.any(np.diff(self.energies) <= 0):
            raise DomainError("sector curve energies must be strictly increasing")
        if self.beta is None:
            self.beta = micro_beta_sector(self)

    @property
    def absolute_energies(self) -> np.ndarray:
        return self.energies * self.sector.j

    def rows(self, derivatives: bool = False) -> list[list[float]]:
        columns = [self.energies, self.rho, self.jz_over_j, self.jx_over_j, self.beta]
        if derivatives:
            columns.extend(sector_derivatives(self))
        return [list(row) for row in zip(*columns)]

    def to_csv(self, path: Path, derivatives: bool = False) -> Path:
        """Write E_over_j, rho, jz_over_j, jx_plus_over_j, beta (plus derivatives)."""
        columns = CSV_COLUMNS + (DERIVATIVE_COLUMNS if derivatives else [])
        return write_csv(path, columns, self.rows(derivatives))


def sector_curve(
    params: ModelParams,
    sector: SectorId,
    e_over_j: np.ndarray,
    method: str = "gauss",
    order: int = 64,
    jx_weight: JxWeight = JxWeight.VERBATIM,
) -> SectorCurve:
    """Evaluate rho, Jz/j, Jx/j (+ branch) and beta on a grid of E/j."""
    lam_eff = _prepare(params, sector)
    e = np.asarray(e_over_j, dtype=float)
    rho, jz, jx = sector_ratios(e, lam_eff, method=method, order=order, jx_weight=jx_weight)
    logger.debug(
        "sector j=%s lambda_eff=%.6g: %d points, %d accessible",
        sector.j,
        lam_eff,
        e.size,
        int(np.count_nonzero(rho > 0)),
    )
    return SectorCurve(
        sector=sector,
        energies=e,
        rho=rho * sector.j,
        jz_over_j=jz,
        jx_over_j=jx,
    )


def micro_beta_sector(curve: SectorCurve) -> np.ndarray:
    """beta = d log rho / dE on the curve grid; nan where rho vanishes on the stencil."""
    with np.errstate(divide="ignore"):
        log_rho = np.log(np.asarray(curve.rho, dtype=float))
    return log_gradient(log_rho, curve.absolute_energies)


def sector_derivatives(curve: SectorCurve) -> tuple[np.ndarray, np.ndarray]:
    """(d rho/dE, d(Jz/j)/dE) by finite differences on the curve grid."""
    energies = curve.absolute_energies
    if energies.size < 2:
        nan = np.full(energies.shape, np.nan)
        return nan, nan.copy()
    return np.gradient(curve.rho, energies), np.gradient(curve.jz_over_j, energies)


def panel_sectors(n_atoms: int, parts: int = 16, first: int = 2) -> list[tuple[int, SectorId]]:
    """Sectors j = k N / parts for k = first..parts/2, rounded to valid j."""
    return [
        (k, SectorId.from_fraction(n_atoms, k / parts))
        for k in range(first, parts // 2 + 1)
    ]


def e_over_j_grid(e_per_atom: np.ndarray, sector: SectorId) -> np.ndarray:
    """Convert an E/N grid into the E/j grid of a sector."""
    return np.asarray(e_per_atom, dtype=float) * sector.n_atoms / sector.j
