"""Multiplicity of the j-multiplets of N spin-1/2 particles."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import gammaln

from dicke.core.errors import DomainError
from dicke.core.model import SectorId


def degeneracy_exact(n_atoms: int, j: float) -> int:
    """g(N, j) = (1 + 2j) / (1 + j + N/2) * C(N, N/2 - j), as an exact integer."""
    sector = SectorId.create(n_atoms, j)
    two_j = sector.two_j
    # (1 + 2j) / (1 + j + N/2) = 2 (1 + 2j) / (2 + 2j + N)
    numerator = 2 * (1 + two_j) * math.comb(n_atoms, (n_atoms - two_j) // 2)
    denominator = 2 + two_j + n_atoms
    value, remainder = divmod(numerator, denominator)
    if remainder:
        raise ArithmeticError(f"non-integer degeneracy for N={n_atoms}, j={j}")
    return value


def degeneracy_sum(n_atoms: int) -> int:
    """Sum over sectors of g(N, j) (2j + 1); equals 2^N."""
    return sum(
        degeneracy_exact(n_atoms, s.j) * (s.two_j + 1) for s in SectorId.all_sectors(n_atoms)
    )


def log_degeneracy(n_atoms: int, x):
    """Continuum log g(N, x) with j = N x, through log-gamma functions."""
    if n_atoms < 2:
        raise DomainError(f"continuum degeneracy needs N >= 2, got {n_atoms}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0) or np.any(x_arr > 0.5):
        raise DomainError("x = j/N must lie in [0, 1/2]")
    j = n_atoms * x_arr
    half = n_atoms / 2
    value = (
        np.log1p(2 * j)
        + gammaln(n_atoms + 1)
        - gammaln(1 + half - j)
        - gammaln(2 + half + j)
    )
    return float(value) if np.ndim(value) == 0 else value


def degeneracy_argmax(n_atoms: int) -> float:
    """Location x_max of the maximum of log g(N, x), close to 1/(2 sqrt N) - 1/(2N)."""
    if n_atoms < 4:
        raise DomainError(f"degeneracy argmax needs N >= 4, got {n_atoms}")
    upper = min(0.5, 5 / math.sqrt(n_atoms))
    result = optimize.minimize_scalar(
        lambda x: -log_degeneracy(n_atoms, x),
        bounds=(0.0, upper),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(result.x)


@dataclass(frozen=True)
class DegeneracyProfile:
    """log g(N, x) together with its maximum."""

    n_atoms: int
    x_max: float

    @classmethod
    def create(cls, n_atoms: int) -> "DegeneracyProfile":
        return cls(n_atoms=n_atoms, x_max=degeneracy_argmax(n_atoms))

    def log_g(self, x):
        return log_degeneracy(self.n_atoms, x)

    @property
    def j_max(self) -> float:
        return self.n_atoms * self.x_max

    def discontinuity_ratio(self) -> float:
        """g(N, 0) / g(N, x_max), which behaves like e^(1/2) / sqrt(N)."""
        return math.exp(self.log_g(0.0) - self.log_g(self.x_max))
