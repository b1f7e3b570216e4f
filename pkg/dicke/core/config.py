"""Run configuration: numerical settings, grids and the key=value config file."""

import logging
import os
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from dicke.core.model import ModelParams
from dicke.core.utils import parse_key_value
from dicke.semiclassics.integrals import JxWeight

logger = logging.getLogger(__name__)

CACHE_ENV = "DICKE_CACHE_DIR"

# Config-file spellings accepted in addition to the click parameter names.
KEY_ALIASES = {
    "lambda": "lam",
    "n": "n_atoms",
    "omega_0": "omega0",
    "bins": "bin_width",
}


def default_cache_dir() -> Path:
    """Cache directory from DICKE_CACHE_DIR, else ~/.cache/dicke."""
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env).expanduser()
    return Path.home() / ".cache" / "dicke"


def load_config_file(path: Path) -> dict[str, str]:
    """Read a key=value config file into parameter-name keyed strings."""
    path = Path(path)
    values = parse_key_value(path.read_text(), source=str(path))
    resolved = {KEY_ALIASES.get(key, key): value for key, value in values.items()}
    logger.debug("loaded %d config values from %s", len(resolved), path)
    return resolved


class EnergyGrid(BaseModel):
    """Uniform grid of energies per atom (or per j for sector curves)."""

    e_min: float
    e_max: float
    e_step: float = Field(gt=0)

    @model_validator(mode="after")
    def check_range(self) -> "EnergyGrid":
        if self.e_max <= self.e_min:
            raise ValueError(f"e_max={self.e_max} must exceed e_min={self.e_min}")
        return self

    def values(self) -> np.ndarray:
        count = int(np.floor((self.e_max - self.e_min) / self.e_step + 1e-9)) + 1
        return self.e_min + self.e_step * np.arange(count)


class BetaGrid(BaseModel):
    """Logarithmically spaced inverse temperatures."""

    beta_min: float = Field(0.01, gt=0)
    beta_max: float = Field(10.0, gt=0)
    beta_count: int = Field(200, ge=2)

    @model_validator(mode="after")
    def check_range(self) -> "BetaGrid":
        if self.beta_max <= self.beta_min:
            raise ValueError(f"beta_max={self.beta_max} must exceed beta_min={self.beta_min}")
        return self

    def values(self) -> np.ndarray:
        return np.geomspace(self.beta_min, self.beta_max, self.beta_count)


class MicroSettings(BaseModel):
    """Numerical knobs of the microcanonical aggregation."""

    mode: Literal["full", "lowest-sector"] = "full"
    x_order: int = Field(8, ge=2, description="Gauss-Legendre order per x panel")
    x_panels: int = Field(64, ge=8, description="Graded x panels before extra breakpoints")
    min_nodes: int = Field(512, ge=1)
    sector_order: int = Field(64, ge=8)
    sector_quadrature: Literal["gauss", "adaptive"] = "gauss"
    jx_weight: JxWeight = JxWeight.VERBATIM


class CanonicalSettings(BaseModel):
    """Numerical knobs of the canonical integrals and the Laplace analysis."""

    order: int = Field(16, ge=4)
    panels: int = Field(64, ge=4)
    truncation_decades: float = Field(60.0, gt=0)
    derivative_step: float = Field(1e-4, gt=0)
    derivative_rtol: float = Field(1e-5, gt=0)
    scan_points: int = Field(4001, ge=101)
    epsilon_sequence: tuple[float, ...] = (1e-6, 1e-7, 1e-8)


class DiagSettings(BaseModel):
    """Truncation and histogram settings of the exact diagonalization."""

    n_max: int = Field(150, ge=1)
    bin_width: float = Field(0.05, gt=0)
    parity_tolerance: float = Field(1e-3, ge=0)
    threads: Optional[int] = Field(None, ge=1)


class RunConfig(BaseModel):
    """Everything one CLI invocation needs, after defaults, file and flags are merged."""

    command: str
    params: ModelParams
    energy_grid: Optional[EnergyGrid] = None
    beta_grid: Optional[BetaGrid] = None
    output: Optional[Path] = None
    cache_dir: Path = Field(default_factory=default_cache_dir)
    threads: Optional[int] = Field(None, ge=1)
    micro: MicroSettings = Field(default_factory=MicroSettings)
    canonical: CanonicalSettings = Field(default_factory=CanonicalSettings)
    diag: DiagSettings = Field(default_factory=DiagSettings)

    @model_validator(mode="after")
    def check_output(self) -> "RunConfig":
        if self.output is not None:
            parent = self.output.expanduser().resolve().parent
            existing = parent
            while not existing.exists():
                existing = existing.parent
            if not os.access(existing, os.W_OK):
                raise ValueError(f"output directory {parent} is not writable")
        return self
