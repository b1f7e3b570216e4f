"""Model parameters and per-sector quantities shared by every ensemble."""

import math
from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field

from dicke.core.errors import DomainError, NoTransitionError


class ModelParams(BaseModel):
    """Couplings and size of the Dicke Hamiltonian.

    H = omega0 Jz + omega a^dag a + (2 lambda / sqrt(N)) Jx (a^dag + a) + epsilon Jx
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    omega: float = Field(1.0, gt=0, description="Photon frequency")
    omega0: float = Field(1.0, gt=0, description="Atomic splitting")
    lam: float = Field(1.5, ge=0, alias="lambda", description="Coupling strength")
    n_atoms: int = Field(100, ge=1, description="Number of two-level atoms N")
    epsilon: float = Field(0.0, ge=0, description="Symmetry-breaking field on Jx")

    @property
    def critical_coupling(self) -> float:
        """Coupling of the superradiant transition, sqrt(omega omega0) / 2."""
        return math.sqrt(self.omega * self.omega0) / 2

    @property
    def is_superradiant(self) -> bool:
        return self.lam > self.critical_coupling

    def replace(self, **changes) -> "ModelParams":
        """Return a validated copy with some fields changed."""
        data = self.model_dump()
        if "lambda" in changes:
            changes["lam"] = changes.pop("lambda")
        data.update(changes)
        return ModelParams(**data)

    def fingerprint(self) -> dict:
        return {
            "omega": self.omega,
            "omega0": self.omega0,
            "lambda": self.lam,
            "n_atoms": self.n_atoms,
            "epsilon": self.epsilon,
        }


def require_unit_frequencies(params: ModelParams) -> None:
    """Semiclassical sector formulas are only valid for omega = omega0 = 1."""
    if params.omega != 1.0 or params.omega0 != 1.0:
        raise DomainError(
            "semiclassical formulas require omega = omega0 = 1, "
            f"got omega={params.omega}, omega0={params.omega0}"
        )


@dataclass(frozen=True)
class SectorId:
    """A total angular momentum sector j of an N-atom system.

    j is stored as the integer 2j so half-integer sectors are exact.
    """

    two_j: int
    n_atoms: int

    @classmethod
    def create(cls, n_atoms: int, j: float) -> "SectorId":
        two_j = round(2 * j)
        if not math.isclose(two_j, 2 * j, abs_tol=1e-9):
            raise DomainError(f"j must be a multiple of 1/2, got {j}")
        sector = cls(two_j=two_j, n_atoms=n_atoms)
        sector.validate()
        return sector

    @classmethod
    def maximal(cls, n_atoms: int) -> "SectorId":
        """The fully symmetric sector j = N/2."""
        return cls(two_j=n_atoms, n_atoms=n_atoms)

    @classmethod
    def from_fraction(cls, n_atoms: int, fraction: float) -> "SectorId":
        """Closest valid sector to j = fraction * N."""
        if not 0 <= fraction <= 0.5:
            raise DomainError(f"j/N must lie in [0, 1/2], got {fraction}")
        two_j = round(2 * fraction * n_atoms)
        if (two_j - n_atoms) % 2:
            two_j = two_j - 1 if two_j > 0 else 1
        return cls.create(n_atoms, two_j / 2)

    @classmethod
    def all_sectors(cls, n_atoms: int) -> list["SectorId"]:
        """Every sector of N spins, in increasing j."""
        return [cls(two_j=t, n_atoms=n_atoms) for t in range(n_atoms % 2, n_atoms + 1, 2)]

    def validate(self) -> None:
        if self.n_atoms < 1:
            raise DomainError(f"n_atoms must be positive, got {self.n_atoms}")
        if not 0 <= self.two_j <= self.n_atoms:
            raise DomainError(f"j={self.j} outside [0, {self.n_atoms / 2}]")
        if (self.n_atoms - self.two_j) % 2:
            raise DomainError(
                f"j={self.j} and N/2={self.n_atoms / 2} must both be integer or half-integer"
            )

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def x(self) -> float:
        return self.j / self.n_atoms


def check_sector(params: ModelParams, sector: SectorId) -> None:
    if sector.n_atoms != params.n_atoms:
        raise DomainError(
            f"sector belongs to N={sector.n_atoms}, parameters have N={params.n_atoms}"
        )
    sector.validate()


def effective_coupling(params: ModelParams, sector: SectorId) -> float:
    """Coupling seen by sector j: lambda * sqrt(2j / N)."""
    check_sector(params, sector)
    return params.lam * math.sqrt(sector.two_j / params.n_atoms)


def critical_coupling_sector(params: ModelParams, sector: SectorId) -> float:
    """Global coupling above which sector j shows an ESQPT."""
    check_sector(params, sector)
    if sector.two_j == 0:
        raise NoTransitionError("no ESQPT in this sector: j = 0 has an infinite critical coupling")
    return math.sqrt(params.n_atoms * params.omega * params.omega0 / (8 * sector.j))


def sector_critical_energies(sector: SectorId) -> tuple[float, float]:
    """(E_c, E_star) = (-j, +j) in units with omega = omega0 = 1."""
    return -sector.j, sector.j


def ground_energy_ratio(lam_eff: float) -> float:
    """Classical sector ground energy divided by j, for a given effective coupling."""
    if lam_eff > 0.5:
        return -(2 * lam_eff**2 + 1 / (8 * lam_eff**2))
    return -1.0


def sector_ground_energy(params: ModelParams, sector: SectorId) -> float:
    """Classical ground energy of sector j (omega = omega0 = 1)."""
    return sector.j * ground_energy_ratio(effective_coupling(params, sector))
