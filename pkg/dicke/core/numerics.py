"""Numerical building blocks: log-domain quadrature, finite differences, extrapolation."""

import logging
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from dicke.core.errors import ConvergenceError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_rule(breakpoints: Sequence[float], order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule.

    Zero-length panels are dropped; the returned nodes are in increasing order.
    """
    edges = np.unique(np.asarray(breakpoints, dtype=float))
    if edges.size < 2:
        return np.empty(0), np.empty(0)
    t, w = gauss_legendre(order)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def log_integrate(
    log_f: Callable[[np.ndarray], np.ndarray],
    breakpoints: Sequence[float],
    order: int = 16,
) -> float:
    """log of the integral of exp(log_f) over a composite Gauss-Legendre rule."""
    nodes, weights = composite_rule(breakpoints, order)
    if nodes.size == 0:
        return -np.inf
    return float(logsumexp(log_f(nodes) + np.log(weights)))


def log_sinh(t: np.ndarray) -> np.ndarray:
    """log(sinh t) for t > 0 without overflow."""
    t = np.asarray(t, dtype=float)
    return t + np.log(-np.expm1(-2 * t)) - np.log(2.0)


def log_2cosh(t: np.ndarray) -> np.ndarray:
    """log(2 cosh t) without overflow."""
    return np.logaddexp(t, -t)


def log_gradient(log_values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """d(log f)/dx on a grid: central in the interior, one-sided at the ends.

    Points whose stencil touches a non-finite log value are returned as nan.
    """
    log_values = np.asarray(log_values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    out = np.full(log_values.shape, np.nan)
    if log_values.size < 2:
        return out
    finite = np.isfinite(log_values)
    with np.errstate(invalid="ignore"):
        out[1:-1] = (log_values[2:] - log_values[:-2]) / (grid[2:] - grid[:-2])
        out[0] = (log_values[1] - log_values[0]) / (grid[1] - grid[0])
        out[-1] = (log_values[-1] - log_values[-2]) / (grid[-1] - grid[-2])
    valid = np.empty(log_values.shape, dtype=bool)
    valid[1:-1] = finite[2:] & finite[:-2]
    valid[0] = finite[0] & finite[1]
    valid[-1] = finite[-1] & finite[-2]
    out[~valid] = np.nan
    return out


def central_difference(
    func: Callable[[float], float],
    x: float,
    step: float = 1e-4,
    rtol: float = 1e-5,
) -> float:
    """First derivative by central differences, verified by halving the step.

    Raises ConvergenceError when the two estimates disagree beyond rtol.
    """
    coarse = (func(x + step) - func(x - step)) / (2 * step)
    half = step / 2
    fine = (func(x + half) - func(x - half)) / (2 * half)
    if not np.isfinite(fine) or abs(fine - coarse) > rtol * max(1.0, abs(fine)):
        raise ConvergenceError(
            "derivative estimate unstable under step halving",
            {"x": x, "step": step, "coarse": coarse, "fine": fine},
        )
    return fine


def richardson(values: Sequence[float], ratio: float) -> float:
    """Extrapolate f(h_k) to h -> 0 for a geometric sequence h_{k+1} = h_k / ratio."""
    table = [float(v) for v in values]
    power = 1
    while len(table) > 1:
        factor = ratio**power
        table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
        power += 1
    return table[0]
