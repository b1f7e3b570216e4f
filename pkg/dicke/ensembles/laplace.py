"""Thermodynamic-limit canonical analysis by Laplace's method.

In the limit N -> infinity the partition function is dominated by the
maximum y0 of

    Psi_eps(y) = -beta omega y^2 + log 2cosh[(beta / 2) sqrt(omega0^2 + (eps + 4 lambda y)^2)]

and the per-atom observables follow from the envelope at y0. Symmetry
breaking is probed by a small field eps taken to zero after N -> infinity.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import optimize

from dicke.core.config import CanonicalSettings
from dicke.core.errors import ConvergenceError, DomainError, NoTransitionError
from dicke.core.model import ModelParams
from dicke.core.numerics import central_difference, log_2cosh, richardson
from dicke.core.utils import write_csv
from dicke.ensembles.base import EnsembleBase
from dicke.ensembles.registry import EnsembleRegistry
from dicke.ensembles.thermo import ThermoCurve

logger = logging.getLogger(__name__)

EPSILON_MODES = ("zero", "finite", "limit-plus", "limit-minus")
CURVATURE_FLOOR = 1e-10
STATE_COLUMNS = ["beta", "y0", "psi", "psi2", "branch"]


@dataclass(frozen=True)
class LaplaceState:
    """Maximum of Psi at one inverse temperature."""

    beta: float
    y0: float
    psi_value: float
    psi_second_derivative: float
    branch: str  # "trivial" or "broken"
    critical: bool = False
    branches: tuple[float, ...] = ()


@dataclass(frozen=True)
class CriticalPoint:
    """Thermal superradiant transition."""

    beta_c: float
    e_c_per_atom: float
    jz_c_per_atom: float

    def to_block(self) -> str:
        return "\n".join(
            [
                f"beta_c={self.beta_c!r}",
                f"e_c_per_atom={self.e_c_per_atom!r}",
                f"jz_c_per_atom={self.jz_c_per_atom!r}",
            ]
        )


def _field(y, params: ModelParams, epsilon: float):
    u = epsilon + 4 * params.lam * np.asarray(y, dtype=float)
    return u, np.sqrt(params.omega0**2 + u**2)


def psi(y, beta: float, params: ModelParams, epsilon: float = 0.0):
    """Psi_eps(y); reduces to Psi at eps = 0."""
    y = np.asarray(y, dtype=float)
    _, theta = _field(y, params, epsilon)
    return -beta * params.omega * y**2 + log_2cosh(0.5 * beta * theta)


def psi_prime(y, beta: float, params: ModelParams, epsilon: float = 0.0):
    y = np.asarray(y, dtype=float)
    u, theta = _field(y, params, epsilon)
    t = np.tanh(0.5 * beta * theta)
    return -2 * beta * params.omega * y + 2 * beta * params.lam * t * u / theta


def psi_second(y, beta: float, params: ModelParams, epsilon: float = 0.0):
    y = np.asarray(y, dtype=float)
    u, theta = _field(y, params, epsilon)
    t = np.tanh(0.5 * beta * theta)
    bracket = t / theta - t * u**2 / theta**3 + 0.5 * beta * (1 - t**2) * u**2 / theta**2
    return -2 * beta * params.omega + 8 * beta * params.lam**2 * bracket


def _scan_bound(params: ModelParams, epsilon: float) -> float:
    # |y0| <= lambda / omega at eps = 0; the field shifts it by eps / (4 lambda).
    return params.lam / params.omega + abs(epsilon) / (4 * params.lam) + 1.0


def _polish(a: float, b: float, beta: float, params: ModelParams, epsilon: float) -> float:
    return optimize.brentq(
        lambda y: float(psi_prime(y, beta, params, epsilon)), a, b, xtol=1e-15, rtol=1e-15
    )


def _small_root(beta: float, params: ModelParams, step: float) -> Optional[float]:
    """Nontrivial maximum lying inside the first scan cell (close to beta_c)."""
    probe = step
    for _ in range(60):
        probe *= 0.5
        if psi_prime(probe, beta, params) > 0:
            return _polish(probe, step, beta, params, 0.0)
    return None


def stationary_maxima(
    beta: float, params: ModelParams, epsilon: float = 0.0, scan_points: int = 4001
) -> list[float]:
    """All local maxima of Psi_eps found by a sign scan of Psi' and a brentq polish."""
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if params.lam == 0:
        return [0.0]
    bound = _scan_bound(params, epsilon)
    grid = np.linspace(-bound, bound, scan_points)
    slope = psi_prime(grid, beta, params, epsilon)
    maxima = []
    for k in range(scan_points - 1):
        if slope[k] > 0 and slope[k + 1] < 0:
            maxima.append(_polish(grid[k], grid[k + 1], beta, params, epsilon))
        elif slope[k + 1] == 0 and 0 < k + 1 < scan_points - 1:
            if slope[k] > 0 and slope[k + 2] < 0:
                maxima.append(float(grid[k + 1]))
    if epsilon == 0:
        if psi_second(0.0, beta, params) <= 0:
            maxima.append(0.0)
        else:
            small = _small_root(beta, params, float(grid[1] - grid[0]))
            if small is not None:
                maxima.extend([small, -small])
    return sorted(set(maxima))


def laplace_maximize(
    beta: float,
    params: ModelParams,
    epsilon: Optional[float] = None,
    scan_points: int = 4001,
) -> LaplaceState:
    """Global maximizer of Psi_eps.

    At eps = 0 the two symmetry-broken maxima are degenerate; the positive one
    is returned and both are listed in `branches`.
    """
    eps = params.epsilon if epsilon is None else epsilon
    candidates = stationary_maxima(beta, params, eps, scan_points)
    if not candidates:
        raise ConvergenceError("no maximum of Psi found", {"beta": beta, "epsilon": eps})
    values = [float(psi(y, beta, params, eps)) for y in candidates]
    top = max(values)
    if eps == 0:
        ties = [y for y, v in zip(candidates, values) if top - v <= 1e-14 * max(1.0, abs(top))]
        y0 = max(ties)
    else:
        y0 = candidates[int(np.argmax(values))]
    curvature = float(psi_second(y0, beta, params, eps))
    critical = abs(curvature) < CURVATURE_FLOOR
    if critical:
        logger.warning(
            "critical regime at beta=%.8g: |Psi''(y0)|=%.3g below %.0e",
            beta,
            abs(curvature),
            CURVATURE_FLOOR,
        )
    broken = params.is_superradiant and beta > _beta_c_or_inf(params)
    branches = (-abs(y0), abs(y0)) if eps == 0 and y0 != 0 else (y0,)
    return LaplaceState(
        beta=beta,
        y0=float(y0),
        psi_value=float(psi(y0, beta, params, eps)),
        psi_second_derivative=curvature,
        branch="broken" if broken else "trivial",
        critical=critical,
        branches=branches,
    )


def laplace_sweep(
    params: ModelParams, betas: np.ndarray, epsilon: Optional[float] = None
) -> list[LaplaceState]:
    """Maximizer trajectory over a grid of inverse temperatures."""
    return [laplace_maximize(float(b), params, epsilon) for b in betas]


def write_states(states: list[LaplaceState], path: Path) -> Path:
    rows = [[s.beta, s.y0, s.psi_value, s.psi_second_derivative, s.branch] for s in states]
    return write_csv(path, STATE_COLUMNS, rows)


def _beta_c_or_inf(params: ModelParams) -> float:
    ratio = params.omega * params.omega0 / (4 * params.lam**2) if params.lam > 0 else math.inf
    if ratio >= 1:
        return math.inf
    return 2 / params.omega0 * math.atanh(ratio)


def solve_gap_equation(beta: float, params: ModelParams) -> float:
    """Root z > 1 of tanh(beta omega0 z / 2) = (omega omega0 / 4 lambda^2) z."""
    if not params.is_superradiant:
        raise NoTransitionError("normal phase only: lambda does not exceed sqrt(omega omega0)/2")
    beta_c = _beta_c_or_inf(params)
    if beta <= beta_c:
        raise NoTransitionError(f"no nontrivial solution for beta={beta} <= beta_c={beta_c}")
    slope = params.omega * params.omega0 / (4 * params.lam**2)

    def gap(z):
        return math.tanh(0.5 * beta * params.omega0 * z) - slope * z

    z = optimize.bisect(gap, 1.0, 1 / slope, xtol=1e-15, rtol=1e-15, maxiter=200)
    residual = abs(gap(z))
    if residual >= 1e-12:
        raise ConvergenceError("gap equation residual too large", {"beta": beta, "residual": residual})
    return z


def order_parameter(z: float, params: ModelParams) -> float:
    """|y0| = (omega0 / 4 lambda) sqrt(z^2 - 1)."""
    return params.omega0 / (4 * params.lam) * math.sqrt(max(z * z - 1, 0.0))


def critical_beta(params: ModelParams) -> CriticalPoint:
    """Critical inverse temperature and the per-atom energy and Jz at the transition."""
    lam_c = params.critical_coupling
    if math.isclose(params.lam, lam_c, rel_tol=1e-12):
        raise NoTransitionError("QPT at beta -> infinity: lambda equals the critical coupling")
    if params.lam < lam_c:
        raise NoTransitionError("no thermal phase transition: lambda below the critical coupling")
    ratio = params.omega * params.omega0 / (4 * params.lam**2)
    beta_c = 2 / params.omega0 * math.atanh(ratio)
    return CriticalPoint(
        beta_c=beta_c,
        e_c_per_atom=-0.5 * params.omega0 * ratio,
        jz_c_per_atom=-0.5 * ratio,
    )


def envelope(y0: float, beta: float, params: ModelParams, epsilon: float):
    """(E/N, Jz/N, Jx/N) at a maximizer."""
    u, theta = _field(y0, params, epsilon)
    u, theta = float(u), float(theta)
    t = math.tanh(0.5 * beta * theta)
    energy = params.omega * y0**2 - 0.5 * theta * t
    return energy, -0.5 * t * params.omega0 / theta, -0.5 * t * u / theta


def laplace_observables(
    beta: float,
    params: ModelParams,
    epsilon_mode: str = "zero",
    epsilon_sequence: tuple[float, ...] = (1e-6, 1e-7, 1e-8),
) -> tuple[float, float, float]:
    """(E/N, Jz/N, Jx/N) in the thermodynamic limit.

    `limit-plus` and `limit-minus` evaluate at eps = +-1e-6, 1e-7, 1e-8 and
    Richardson-extrapolate to zero; `finite` uses params.epsilon as given.
    """
    if epsilon_mode not in EPSILON_MODES:
        raise ValueError(f"epsilon_mode must be one of {EPSILON_MODES}, got '{epsilon_mode}'")
    if epsilon_mode in ("zero", "finite"):
        eps = 0.0 if epsilon_mode == "zero" else params.epsilon
        state = laplace_maximize(beta, params, eps)
        return envelope(state.y0, beta, params, eps)
    sign = 1.0 if epsilon_mode == "limit-plus" else -1.0
    samples = []
    for eps in epsilon_sequence:
        state = laplace_maximize(beta, params, sign * eps)
        samples.append(envelope(state.y0, beta, params, sign * eps))
    ratio = epsilon_sequence[0] / epsilon_sequence[1]
    return tuple(richardson([s[k] for s in samples], ratio) for k in range(3))


def laplace_djz_de(beta: float, params: ModelParams, step: float = 1e-4) -> float:
    """dJz/dE along the Laplace branch, (dJz/dbeta) / (dE/dbeta)."""

    def jz(b):
        return laplace_observables(b, params)[1]

    def energy(b):
        return laplace_observables(b, params)[0]

    d_energy = central_difference(energy, beta, step, rtol=1e-3)
    d_jz = central_difference(jz, beta, step, rtol=1e-3)
    return d_jz / d_energy


@EnsembleRegistry.register("laplace")
class LaplaceEnsemble(EnsembleBase):
    """Saddle-point thermodynamics with the eps -> 0 order parameter."""

    ensemble = "laplace"
    settings_class = CanonicalSettings

    def curve(self, grid: np.ndarray) -> ThermoCurve:
        betas = np.asarray(grid, dtype=float)
        sequence = self.settings.epsilon_sequence
        rows = []
        for beta in betas:
            energy, jz, _ = laplace_observables(float(beta), self.params, "zero")
            if self.params.epsilon > 0:
                jx_minus = laplace_observables(float(beta), self.params, "finite")[2]
                jx_plus = -jx_minus
            else:
                jx_minus = laplace_observables(float(beta), self.params, "limit-plus", sequence)[2]
                jx_plus = laplace_observables(float(beta), self.params, "limit-minus", sequence)[2]
            rows.append((energy, beta, jz, jx_plus, jx_minus))
        table = np.array(rows, dtype=float).reshape(len(rows), 5)
        return ThermoCurve(
            ensemble=self.ensemble,
            n_atoms=self.params.n_atoms,
            e_per_atom=table[:, 0],
            beta=table[:, 1],
            jz_per_atom=table[:, 2],
            jx_plus_per_atom=table[:, 3],
            jx_minus_per_atom=table[:, 4],
        )
