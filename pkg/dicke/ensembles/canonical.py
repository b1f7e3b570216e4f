"""Finite-N canonical ensemble.

Two partition functions are provided: the symmetric sector j = N/2 alone and
the full model summed over every sector. Both reduce to a single classical
photon-field integral that is evaluated in the log domain; thermodynamic
observables are log-derivatives of log Z taken by central differences.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from dicke.core.config import CanonicalSettings
from dicke.core.errors import ConvergenceError, DomainError
from dicke.core.model import ModelParams
from dicke.core.numerics import central_difference, log_integrate, log_sinh
from dicke.ensembles.base import EnsembleBase
from dicke.ensembles.laplace import psi
from dicke.ensembles.registry import EnsembleRegistry
from dicke.ensembles.thermo import ThermoCurve

logger = logging.getLogger(__name__)

Partition = Callable[..., float]


def _peak_intervals(
    log_f: Callable[[np.ndarray], np.ndarray],
    scale: float,
    gap: float,
    scan_points: int,
) -> list[tuple[float, float]]:
    """Intervals outside which log_f lies more than `gap` below its maximum."""
    bound = scale
    for _ in range(64):
        grid = np.linspace(-bound, bound, scan_points)
        values = log_f(grid)
        top = float(np.max(values))
        if values[0] < top - gap and values[-1] < top - gap:
            break
        bound *= 2
    else:
        raise ConvergenceError("integrand does not decay", {"bound": bound})

    peaks = []
    for k in range(1, scan_points - 1):
        if values[k] >= values[k - 1] and values[k] >= values[k + 1]:
            result = optimize.minimize_scalar(
                lambda y: -float(log_f(np.asarray(y))),
                bounds=(grid[k - 1], grid[k + 1]),
                method="bounded",
                options={"xatol": 1e-13},
            )
            peaks.append((float(result.x), -float(result.fun), k))
    top = max(value for _, value, _ in peaks)
    floor = top - gap

    def excess(y):
        return float(log_f(np.asarray(y))) - floor

    intervals = []
    for y_peak, value, k in peaks:
        if value <= floor:
            continue
        left = k
        while values[left] >= floor:
            left -= 1
        right = k
        while values[right] >= floor:
            right += 1
        lo = optimize.brentq(excess, grid[left], min(y_peak, grid[left + 1]))
        hi = optimize.brentq(excess, max(y_peak, grid[right - 1]), grid[right])
        intervals.append((lo, hi))

    intervals.sort()
    merged = [intervals[0]]
    for lo, hi in intervals[1:]:
        if lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return merged


def log_line_integral(
    log_f: Callable[[np.ndarray], np.ndarray],
    settings: CanonicalSettings,
    scale: float = 1.0,
) -> float:
    """log of the integral of exp(log_f) over the real line.

    The integrand is truncated where it falls `truncation_decades` decades
    below its maximum; each retained interval gets `panels` Gauss-Legendre
    panels, and the result is checked against twice as many panels.
    """
    gap = settings.truncation_decades * math.log(10)
    intervals = _peak_intervals(log_f, scale, gap, settings.scan_points)

    def total(panels: int) -> float:
        parts = [
            log_integrate(log_f, np.linspace(lo, hi, panels + 1), settings.order)
            for lo, hi in intervals
        ]
        return float(logsumexp(parts))

    coarse = total(settings.panels)
    fine = total(2 * settings.panels)
    if not np.isfinite(fine) or abs(fine - coarse) > 1e-10 * max(1.0, abs(fine)):
        raise ConvergenceError(
            "partition integral not converged under panel doubling",
            {"coarse": coarse, "fine": fine, "intervals": len(intervals)},
        )
    return fine


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")


def partition_jmax(
    params: ModelParams,
    beta: float,
    settings: Optional[CanonicalSettings] = None,
    epsilon: Optional[float] = None,
) -> float:
    """log Z of the j = N/2 sector.

    Z = (pi beta omega)^(-1/2) int dx exp(-beta omega x^2)
        sinh(beta (N+1) theta / 2) / sinh(beta theta / 2),
    theta = sqrt(omega0^2 + (eps + 4 lambda x / sqrt N)^2), the closed form of
    the sum over m = -N/2..N/2.
    """
    _check_beta(beta)
    settings = settings or CanonicalSettings()
    eps = params.epsilon if epsilon is None else epsilon
    n = params.n_atoms
    root_n = math.sqrt(n)

    def log_f(x):
        theta = np.sqrt(params.omega0**2 + (eps + 4 * params.lam * x / root_n) ** 2)
        return (
            -beta * params.omega * x**2
            + log_sinh(0.5 * beta * (n + 1) * theta)
            - log_sinh(0.5 * beta * theta)
        )

    scale = root_n * (params.lam / params.omega + 1.0)
    prefactor = -0.5 * math.log(math.pi * beta * params.omega)
    return prefactor + log_line_integral(log_f, settings, scale)


def partition_full(
    params: ModelParams,
    beta: float,
    settings: Optional[CanonicalSettings] = None,
    epsilon: Optional[float] = None,
) -> float:
    """log Z of the full model, sqrt(N / (pi beta omega)) int dy exp(N Psi_eps(y))."""
    _check_beta(beta)
    settings = settings or CanonicalSettings()
    eps = params.epsilon if epsilon is None else epsilon
    n = params.n_atoms

    def log_f(y):
        return n * psi(y, beta, params, eps)

    scale = params.lam / params.omega + 1.0
    prefactor = 0.5 * math.log(n) - 0.5 * math.log(math.pi * beta * params.omega)
    return prefactor + log_line_integral(log_f, settings, scale)


PARTITIONS: dict[str, Partition] = {"jmax": partition_jmax, "full": partition_full}


def energy_canonical(
    partition: Partition,
    params: ModelParams,
    betas: np.ndarray,
    settings: Optional[CanonicalSettings] = None,
) -> np.ndarray:
    """<E> = -d log Z / d beta on a grid of inverse temperatures."""
    settings = settings or CanonicalSettings()
    values = []
    for beta in np.atleast_1d(np.asarray(betas, dtype=float)):
        step = min(settings.derivative_step, 0.5 * beta)
        values.append(
            -central_difference(
                lambda b: partition(params, b, settings),
                float(beta),
                step,
                settings.derivative_rtol,
            )
        )
    return np.array(values)


def jz_canonical(
    partition: Partition,
    params: ModelParams,
    betas: np.ndarray,
    settings: Optional[CanonicalSettings] = None,
) -> np.ndarray:
    """<Jz> = -(1/beta) d log Z / d omega0."""
    settings = settings or CanonicalSettings()
    step = min(settings.derivative_step, 0.5 * params.omega0)
    values = []
    for beta in np.atleast_1d(np.asarray(betas, dtype=float)):
        derivative = central_difference(
            lambda w: partition(params.replace(omega0=w), float(beta), settings),
            params.omega0,
            step,
            settings.derivative_rtol,
        )
        values.append(-derivative / beta)
    return np.array(values)


def jx_canonical(
    partition: Partition,
    params: ModelParams,
    betas: np.ndarray,
    settings: Optional[CanonicalSettings] = None,
) -> np.ndarray:
    """<Jx> = -(1/beta) d log Z_eps / d eps at eps = params.epsilon; zero at eps = 0."""
    settings = settings or CanonicalSettings()
    values = []
    for beta in np.atleast_1d(np.asarray(betas, dtype=float)):
        if params.epsilon == 0:
            # Z_eps is even in eps
            values.append(0.0)
            continue
        derivative = central_difference(
            lambda e: partition(params, float(beta), settings, epsilon=e),
            params.epsilon,
            settings.derivative_step,
            settings.derivative_rtol,
        )
        values.append(-derivative / beta)
    return np.array(values)


@EnsembleRegistry.register("canonical")
class CanonicalEnsemble(EnsembleBase):
    """Finite-N canonical sweep over inverse temperatures."""

    ensemble = "canonical"
    settings_class = CanonicalSettings

    def __init__(self, params, settings=None, threads=None, sector: str = "full"):
        if sector not in PARTITIONS:
            raise ValueError(f"sector must be one of {sorted(PARTITIONS)}, got '{sector}'")
        self.sector = sector
        super().__init__(params, settings, threads)

    def curve(self, grid: np.ndarray) -> ThermoCurve:
        betas = np.asarray(grid, dtype=float)
        partition = PARTITIONS[self.sector]
        n = self.params.n_atoms
        energy = energy_canonical(partition, self.params, betas, self.settings) / n
        jz = jz_canonical(partition, self.params, betas, self.settings) / n
        jx = jx_canonical(partition, self.params, betas, self.settings) / n
        logger.debug("canonical %s sweep over %d temperatures (N=%d)", self.sector, betas.size, n)
        return ThermoCurve(
            ensemble=self.ensemble,
            n_atoms=n,
            e_per_atom=energy,
            beta=betas,
            jz_per_atom=jz,
            jx_plus_per_atom=jx,
            jx_minus_per_atom=-jx,
        )
