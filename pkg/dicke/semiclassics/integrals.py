"""Phase-space integrals behind the semiclassical sector formulas.

All quantities are expressed per unit j: the energy enters as e = E/j and the
coupling as the sector's effective coupling. The integrand

    acos( sqrt( (y - e) / (2 lam^2 (1 - y^2)) ) )

vanishes at the classical turning points, where it behaves like sqrt(y+ - y).
"""

import logging
import math
from enum import Enum

import numpy as np
from scipy import integrate

from dicke.core.errors import ConvergenceError
from dicke.core.numerics import gauss_legendre

logger = logging.getLogger(__name__)

ABS_TOL = 1e-10
REL_TOL = 1e-8


class JxWeight(str, Enum):
    """Weight of the Jx phase-space integral."""

    VERBATIM = "verbatim"  # (1 - y^2)
    CLASSICAL = "classical"  # sqrt(1 - y^2)


def turning_roots(e, lam):
    """Roots of 2 lam^2 y^2 + y - e - 2 lam^2 = 0, returned as (y_minus, y_plus)."""
    e = np.asarray(e, dtype=float)
    lam = np.asarray(lam, dtype=float)
    lam2 = lam**2
    root = np.sqrt(np.maximum(discriminant(e, lam), 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        return (-1 - root) / (4 * lam2), (-1 + root) / (4 * lam2)


def discriminant(e, lam):
    lam2 = np.asarray(lam, dtype=float) ** 2
    return 1 + 8 * np.asarray(e, dtype=float) * lam2 + 16 * lam2**2


def acos_kernel(y, e, lam):
    """The phase-space integrand, with its argument clamped to [0, 1]."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (y - e) / (2 * lam**2 * (1 - y**2))
        arg = np.sqrt(np.clip(ratio, 0.0, None))
    arg = np.nan_to_num(arg, nan=1.0, posinf=1.0)
    return np.arccos(np.clip(arg, 0.0, 1.0))


def ground_ratio(lam):
    """Vectorized sector ground energy divided by j."""
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore"):
        deep = -(2 * lam**2 + 1 / (8 * lam**2))
    return np.where(lam > 0.5, deep, -1.0)


def _weights(y, jx_weight: JxWeight):
    one_minus = np.clip(1 - y**2, 0.0, None)
    if jx_weight == JxWeight.CLASSICAL:
        return np.sqrt(one_minus)
    return one_minus


def integration_limits(e: np.ndarray, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lower/upper y limits and a mask of points with a non-empty integral."""
    y_minus, y_plus = turning_roots(e, lam)
    lower_branch = e < -1
    lo = np.where(lower_branch, y_minus, e)
    hi = y_plus
    ground = ground_ratio(lam)
    active = (e <= 1) & (e > ground) & (lam > 0) & (hi > lo)
    return lo, hi, active


def moments_gauss(
    e: np.ndarray,
    lam: np.ndarray,
    order: int = 64,
    jx_weight: JxWeight = JxWeight.VERBATIM,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(I0, I1, I2) for arrays of (e, lam) with a sine-mapped Gauss-Legendre rule.

    The map y = c + h sin(theta) turns the square-root endpoint behaviour into a
    smooth integrand on theta in [-pi/2, pi/2].
    """
    e = np.atleast_1d(np.asarray(e, dtype=float))
    lam = np.broadcast_to(np.asarray(lam, dtype=float), e.shape)
    out = [np.zeros(e.shape) for _ in range(3)]
    lo, hi, active = integration_limits(e, lam)
    if not active.any():
        return tuple(out)
    t, w = gauss_legendre(order)
    theta = 0.5 * math.pi * t
    wt = 0.5 * math.pi * w
    c = 0.5 * (lo[active] + hi[active])
    h = 0.5 * (hi[active] - lo[active])
    y = c[:, None] + h[:, None] * np.sin(theta)[None, :]
    jac = h[:, None] * (np.cos(theta) * wt)[None, :]
    kernel = acos_kernel(y, e[active][:, None], lam[active][:, None]) * jac
    out[0][active] = kernel.sum(axis=1)
    out[1][active] = (kernel * y).sum(axis=1)
    out[2][active] = (kernel * _weights(y, jx_weight)).sum(axis=1)
    return tuple(out)


def moments_adaptive(
    e: np.ndarray,
    lam: np.ndarray,
    jx_weight: JxWeight = JxWeight.VERBATIM,
    epsabs: float = ABS_TOL,
    epsrel: float = REL_TOL,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(I0, I1, I2) by adaptive quadrature, point by point."""
    e = np.atleast_1d(np.asarray(e, dtype=float))
    lam = np.broadcast_to(np.asarray(lam, dtype=float), e.shape)
    out = [np.zeros(e.shape) for _ in range(3)]
    lo, hi, active = integration_limits(e, lam)
    weights = (
        lambda y: 1.0,
        lambda y: y,
        lambda y: float(_weights(np.asarray(y), jx_weight)),
    )
    for idx in np.flatnonzero(active):
        ei, li = float(e[idx]), float(lam[idx])
        for k, weight in enumerate(weights):
            value, error = integrate.quad(
                lambda y: weight(y) * float(acos_kernel(y, ei, li)),
                float(lo[idx]),
                float(hi[idx]),
                epsabs=epsabs,
                epsrel=epsrel,
                limit=200,
            )
            if error > max(epsabs, epsrel * abs(value)) * 100:
                raise ConvergenceError(
                    "sector quadrature did not converge",
                    {"e": ei, "lambda_eff": li, "moment": k, "error": error},
                )
            out[k][idx] = value
    return tuple(out)


def sector_ratios(
    e,
    lam,
    method: str = "gauss",
    order: int = 64,
    jx_weight: JxWeight = JxWeight.VERBATIM,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-unit-j sector observables (rho/j, Jz/j, Jx/j for the + branch).

    rho/j is 2 above e = 1 and 0 at or below the classical ground energy; Jz/j and
    Jx/j are nan where rho vanishes.
    """
    e = np.atleast_1d(np.asarray(e, dtype=float))
    lam = np.broadcast_to(np.asarray(lam, dtype=float), e.shape)
    if method == "adaptive":
        i0, i1, i2 = moments_adaptive(e, lam, jx_weight)
    elif method == "gauss":
        i0, i1, i2 = moments_gauss(e, lam, order, jx_weight)
    else:
        raise ValueError(f"unknown sector quadrature '{method}'")

    middle = (e >= -1) & (e <= 1)
    above = e > 1
    rho = np.where(above, 2.0, 0.0)
    rho = rho + np.where(middle, e + 1, 0.0) + (2 / math.pi) * i0
    jz_num = np.where(middle, 0.5 * (e**2 - 1), 0.0) + (2 / math.pi) * i1
    jx_num = np.where(e < -1, (2 / math.pi) * i2, 0.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        jz = np.where(rho > 0, jz_num / rho, np.nan)
        jx = np.where(rho > 0, jx_num / rho, np.nan)
    jz = np.where(above, 0.0, jz)
    jx = np.where(above, 0.0, jx)
    return rho, jz, jx
