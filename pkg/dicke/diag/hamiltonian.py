"""Dicke Hamiltonian of one j-sector in a truncated photon (x) spin basis."""

import math
from dataclasses import dataclass

import numpy as np

from dicke.core.errors import DomainError
from dicke.core.model import ModelParams, SectorId, check_sector


@dataclass(frozen=True)
class SectorBasis:
    """Product basis |n> |j, m>, n = 0..n_max, flat index n (2j+1) + (m + j)."""

    sector: SectorId
    n_max: int

    @classmethod
    def create(cls, sector: SectorId, n_max: int) -> "SectorBasis":
        if n_max < 1:
            raise DomainError(f"photon truncation n_max must be at least 1, got {n_max}")
        return cls(sector=sector, n_max=n_max)

    @property
    def spin_dimension(self) -> int:
        return self.sector.two_j + 1

    @property
    def dimension(self) -> int:
        return self.spin_dimension * (self.n_max + 1)

    def index(self, n: int, m: float) -> int:
        offset = round(m + self.sector.j)
        if not 0 <= n <= self.n_max or not 0 <= offset < self.spin_dimension:
            raise DomainError(f"state n={n}, m={m} outside the basis")
        return n * self.spin_dimension + offset

    def state(self, index: int) -> tuple[int, float]:
        n, offset = divmod(index, self.spin_dimension)
        return n, offset - self.sector.j

    def m_values(self) -> np.ndarray:
        return np.arange(self.spin_dimension) - self.sector.j

    def n_values(self) -> np.ndarray:
        return np.arange(self.n_max + 1, dtype=float)


def spin_operators(sector: SectorId) -> tuple[np.ndarray, np.ndarray]:
    """(Jz, Jx) of spin j in the |j, m> basis ordered by increasing m."""
    j = sector.j
    m = np.arange(sector.two_j + 1) - j
    raising = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    j_plus = np.diag(raising, k=-1)
    return np.diag(m), 0.5 * (j_plus + j_plus.T)


def annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)


def parity_diagonal(basis: SectorBasis) -> np.ndarray:
    """Eigenvalues (-1)^(n + m + j) of the parity operator on the basis states."""
    n = np.arange(basis.n_max + 1)[:, None]
    m_plus_j = np.arange(basis.spin_dimension)[None, :]
    return np.where((n + m_plus_j) % 2 == 0, 1.0, -1.0).ravel()


def build_hamiltonian(sector: SectorId, basis: SectorBasis, params: ModelParams) -> np.ndarray:
    """Real symmetric H = omega n + omega0 Jz + (2 lambda / sqrt N) Jx (a + a^dag) + eps Jx."""
    check_sector(params, sector)
    if basis.sector != sector:
        raise DomainError(f"basis built for j={basis.sector.j}, sector has j={sector.j}")
    jz, jx = spin_operators(sector)
    a = annihilation(basis.n_max)
    photon_identity = np.eye(basis.n_max + 1)
    spin_identity = np.eye(basis.spin_dimension)

    hamiltonian = params.omega * np.kron(np.diag(basis.n_values()), spin_identity)
    hamiltonian += params.omega0 * np.kron(photon_identity, jz)
    if params.lam:
        coupling = 2 * params.lam / math.sqrt(params.n_atoms)
        hamiltonian += coupling * np.kron(a + a.T, jx)
    if params.epsilon:
        hamiltonian += params.epsilon * np.kron(photon_identity, jx)
    return hamiltonian
