"""Finite-size precursors of the critical point in microcanonical curves."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from dicke.core.config import MicroSettings
from dicke.core.errors import PrecursorNotFoundError
from dicke.core.model import ModelParams
from dicke.ensembles.laplace import critical_beta
from dicke.ensembles.micro import MicroAggregator

logger = logging.getLogger(__name__)

DEFAULT_LADDER = (1_000, 3_000, 10_000, 30_000, 100_000)


@dataclass(frozen=True)
class Precursor:
    """Finite-N estimate of the critical energy per atom."""

    n_atoms: int
    e_per_atom: float
    jz_per_atom: Optional[float] = None

    @property
    def energy(self) -> float:
        return self.e_per_atom * self.n_atoms


def _parabola_vertex(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    a, b, c = np.polyfit(xs - xs[1], ys, 2)
    if a <= 0:
        return float(xs[1]), float(ys[1])
    shift = -b / (2 * a)
    return float(xs[1] + shift), float(c - b * b / (4 * a))


def find_precursor_jz(
    params: ModelParams,
    half_width: float = 0.05,
    step: float = 1e-3,
    settings: Optional[MicroSettings] = None,
    threads: Optional[int] = None,
) -> Precursor:
    """Energy and depth of the Jz/N minimum near the critical energy.

    The minimum is located on a grid scan of width 2 * half_width around the
    canonical critical energy and refined by a parabola through the lowest
    point and its neighbours.
    """
    e_c = critical_beta(params).e_c_per_atom
    aggregator = MicroAggregator(params, settings)
    grid = np.arange(e_c - half_width, e_c + half_width + 0.5 * step, step)
    jz = aggregator.sweep(grid, threads)[:, 1]
    k = int(np.nanargmin(jz))
    if k == 0 or k == grid.size - 1:
        raise PrecursorNotFoundError(
            "dip vanished: Jz/N has no interior minimum near the critical energy",
            {"n_atoms": params.n_atoms, "window": (float(grid[0]), float(grid[-1]))},
        )
    e_min, jz_min = _parabola_vertex(grid[k - 1 : k + 2], jz[k - 1 : k + 2])
    logger.debug("N=%d: Jz/N minimum %.6g at E/N=%.6g", params.n_atoms, jz_min, e_min)
    return Precursor(n_atoms=params.n_atoms, e_per_atom=e_min, jz_per_atom=jz_min)


def find_precursor_jx(
    params: ModelParams,
    threshold: float = 0.01,
    e_min: float = -0.5,
    step: float = 5e-3,
    settings: Optional[MicroSettings] = None,
    threads: Optional[int] = None,
) -> Precursor:
    """Lowest energy at which Jx/N (+ branch) drops below the threshold.

    A coarse upward scan brackets the crossing and bisection refines it.
    """
    aggregator = MicroAggregator(params, settings)

    def jx(e: float) -> float:
        return aggregator.evaluate(e)[2]

    grid = np.arange(e_min, 0.0 + 0.5 * step, step)
    values = aggregator.sweep(grid, threads)[:, 2]
    below = np.flatnonzero(np.nan_to_num(values, nan=0.0) < threshold)
    if below.size == 0:
        raise PrecursorNotFoundError(
            "Jx/N never drops below the threshold", {"threshold": threshold}
        )
    k = int(below[0])
    if k == 0:
        raise PrecursorNotFoundError(
            "Jx/N is below the threshold over the entire scan",
            {"threshold": threshold, "e_min": e_min},
        )
    e_cross = optimize.bisect(lambda e: jx(e) - threshold, grid[k - 1], grid[k], xtol=1e-9)
    return Precursor(n_atoms=params.n_atoms, e_per_atom=float(e_cross))


def delta_e(precursor: Precursor, params: ModelParams) -> float:
    """E^(N)/N - E_c/N with E_c from the canonical closed form.

    Signed: a precursor at or below E_c gives delta <= 0, which fit_powerlaw rejects.
    """
    return precursor.e_per_atom - critical_beta(params).e_c_per_atom


def delta_jz(precursor: Precursor, params: ModelParams) -> float:
    """|Jz_min/N - Jz_c/N|."""
    if precursor.jz_per_atom is None:
        raise ValueError("precursor carries no Jz value")
    return abs(precursor.jz_per_atom - critical_beta(params).jz_c_per_atom)
