"""Full-model microcanonical ensemble.

Sectors are aggregated in the continuum x = j/N:

    rho(E, N) = int_0^{1/2} g(N, x) rho(E, N x) dx

and the observables are rho-weighted averages over the same measure. All
weights stay in the log domain since g(N, x) ~ 2^N.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from dicke.core.config import MicroSettings
from dicke.core.model import ModelParams, require_unit_frequencies
from dicke.core.numerics import composite_rule, log_gradient
from dicke.ensembles.base import EnsembleBase
from dicke.ensembles.degeneracy import DegeneracyProfile
from dicke.ensembles.registry import EnsembleRegistry
from dicke.ensembles.thermo import ThermoCurve
from dicke.semiclassics.integrals import sector_ratios

logger = logging.getLogger(__name__)

SMALLEST_OFFSET = 1e-8
# beta(E) is singular at E/N = 0
KINK_ENERGY = 0.0
KINK_TOLERANCE = 1e-6


def supercritical_threshold(lam: float) -> float:
    """x above which a sector's effective coupling exceeds 1/2."""
    if lam <= 0:
        return math.inf
    return 1 / (8 * lam**2)


def support_lower_bound(e_per_atom: float, lam: float) -> Optional[float]:
    """Smallest x whose sector ground energy lies at or below E/N, or None if empty."""
    if e_per_atom >= 0:
        return 0.0
    x_c = supercritical_threshold(lam)
    if -e_per_atom <= x_c:
        x_low = -e_per_atom
    else:
        x_low = math.sqrt((-e_per_atom - 1 / (16 * lam**2)) / (4 * lam**2))
    if x_low >= 0.5:
        return None
    return x_low


def x_breakpoints(
    e_per_atom: float, lam: float, x_low: float, x_max: float, panels: int = 64
) -> np.ndarray:
    """Panel edges on [x_low, 1/2], graded geometrically away from x_low."""
    span = 0.5 - x_low
    graded = x_low + span * np.concatenate(
        [[0.0], np.geomspace(SMALLEST_OFFSET, 1.0, panels - 1)]
    )
    extras = [abs(e_per_atom), supercritical_threshold(lam), x_max]
    extras = [x for x in extras if x_low < x < 0.5]
    return np.unique(np.concatenate([graded, extras]))


class MicroAggregator:
    """Evaluates log rho(E, N) and the averaged observables for one parameter set."""

    def __init__(self, params: ModelParams, settings: Optional[MicroSettings] = None):
        require_unit_frequencies(params)
        self.params = params
        self.settings = settings or MicroSettings()
        self.profile = DegeneracyProfile.create(params.n_atoms)

    def nodes(self, e_per_atom: float) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes and weights in x for one energy; empty if inaccessible."""
        x_low = support_lower_bound(e_per_atom, self.params.lam)
        if x_low is None:
            return np.empty(0), np.empty(0)
        edges = x_breakpoints(
            e_per_atom, self.params.lam, x_low, self.profile.x_max, self.settings.x_panels
        )
        nodes, weights = composite_rule(edges, self.settings.x_order)
        if nodes.size < self.settings.min_nodes:
            refined = np.unique(np.concatenate([edges, 0.5 * (edges[1:] + edges[:-1])]))
            nodes, weights = composite_rule(refined, self.settings.x_order)
        return nodes, weights

    def _sector_terms(self, e_per_atom: float, x: np.ndarray):
        """log rho(E, Nx), Jz/j and Jx/j at the nodes."""
        lam_eff = self.params.lam * np.sqrt(2 * x)
        rho_over_j, jz, jx = sector_ratios(
            e_per_atom / x,
            lam_eff,
            method=self.settings.sector_quadrature,
            order=self.settings.sector_order,
            jx_weight=self.settings.jx_weight,
        )
        with np.errstate(divide="ignore"):
            log_rho = np.log(rho_over_j) + np.log(self.params.n_atoms * x)
        return log_rho, jz, jx

    def evaluate(self, e_per_atom: float) -> tuple[float, float, float]:
        """(log rho, Jz/N, Jx/N on the + branch) at one energy per atom."""
        if self.settings.mode == "lowest-sector":
            return self._lowest_sector(e_per_atom)
        x, w = self.nodes(e_per_atom)
        if x.size == 0:
            return -math.inf, math.nan, math.nan
        log_rho, jz, jx = self._sector_terms(e_per_atom, x)
        log_terms = self.profile.log_g(x) + log_rho + np.log(w)
        log_dos = float(logsumexp(log_terms))
        if not np.isfinite(log_dos):
            return -math.inf, math.nan, math.nan
        weights = np.exp(log_terms - log_dos)
        live = weights > 0
        jz_avg = float(np.sum(weights[live] * x[live] * jz[live]))
        jx_avg = float(np.sum(weights[live] * x[live] * jx[live]))
        return log_dos, jz_avg, jx_avg

    def _lowest_sector(self, e_per_atom: float) -> tuple[float, float, float]:
        """Observables of the lowest accessible sector only."""
        x_low = support_lower_bound(e_per_atom, self.params.lam)
        if x_low is None:
            return -math.inf, math.nan, math.nan
        x = np.array([min(x_low * (1 + 1e-6) + 1e-9, 0.5)])
        log_rho, jz, jx = self._sector_terms(e_per_atom, x)
        if not np.isfinite(log_rho[0]):
            return -math.inf, math.nan, math.nan
        log_dos = float(self.profile.log_g(x[0]) + log_rho[0])
        return log_dos, float(x[0] * jz[0]), float(x[0] * jx[0])

    def sweep(self, e_per_atom: np.ndarray, threads: Optional[int] = None) -> np.ndarray:
        """Evaluate on a grid; rows (log rho, Jz/N, Jx/N) in grid order."""
        grid = [float(e) for e in np.asarray(e_per_atom, dtype=float)]
        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(self.evaluate, grid))
        else:
            results = [self.evaluate(e) for e in grid]
        logger.debug("micro sweep over %d energies (N=%d)", len(grid), self.params.n_atoms)
        return np.array(results, dtype=float).reshape(len(grid), 3)


def dos_full(energy: float, params: ModelParams, settings: Optional[MicroSettings] = None) -> float:
    """log rho(E, N); -inf when no sector reaches energy E."""
    return MicroAggregator(params, settings).evaluate(energy / params.n_atoms)[0]


def jz_full(energy: float, params: ModelParams, settings: Optional[MicroSettings] = None) -> float:
    """Microcanonical <Jz>/N of the full model."""
    return MicroAggregator(params, settings).evaluate(energy / params.n_atoms)[1]


def jx_full(
    energy: float,
    params: ModelParams,
    branch: str = "+",
    settings: Optional[MicroSettings] = None,
) -> float:
    """Microcanonical <Jx>/N on one parity-broken branch."""
    if branch not in ("+", "-"):
        raise ValueError(f"branch must be '+' or '-', got '{branch}'")
    value = MicroAggregator(params, settings).evaluate(energy / params.n_atoms)[2]
    return value if branch == "+" else -value


def micro_beta_full(e_per_atom: np.ndarray, log_dos: np.ndarray, n_atoms: int) -> np.ndarray:
    """beta = d log rho / dE from log rho on an E/N grid.

    E/N = 0 is a kink of log rho: differences never straddle it, and a grid
    point sitting on it is returned as nan.
    """
    e = np.asarray(e_per_atom, dtype=float)
    log_dos = np.asarray(log_dos, dtype=float)
    beta = np.full(e.shape, np.nan)
    tol = KINK_TOLERANCE * (np.min(np.abs(np.diff(e))) if e.size > 1 else 1.0)
    for side in (e < KINK_ENERGY - tol, e > KINK_ENERGY + tol):
        if np.count_nonzero(side) >= 2:
            beta[side] = log_gradient(log_dos[side], e[side] * n_atoms)
    if np.any(np.abs(e - KINK_ENERGY) <= tol):
        logger.debug("beta marked nan at the E/N = 0 singularity")
    return beta


@EnsembleRegistry.register("micro")
class MicroEnsemble(EnsembleBase):
    """Degeneracy-weighted aggregation of the semiclassical sectors."""

    ensemble = "micro"
    settings_class = MicroSettings

    def validate_params(self) -> None:
        require_unit_frequencies(self.params)

    def curve(self, grid: np.ndarray) -> ThermoCurve:
        grid = np.asarray(grid, dtype=float)
        table = MicroAggregator(self.params, self.settings).sweep(grid, self.threads)
        log_dos, jz, jx = table[:, 0], table[:, 1], table[:, 2]
        return ThermoCurve(
            ensemble=self.ensemble,
            n_atoms=self.params.n_atoms,
            e_per_atom=grid,
            beta=micro_beta_full(grid, log_dos, self.params.n_atoms),
            jz_per_atom=jz,
            jx_plus_per_atom=jx,
            jx_minus_per_atom=-jx,
        )
