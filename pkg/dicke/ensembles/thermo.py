"""Full-model thermodynamic curves shared by every ensemble."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from dicke.core.utils import read_csv, write_csv

CSV_COLUMNS = ["E_per_N", "beta", "jz_per_N", "jx_plus_per_N", "jx_minus_per_N", "ensemble"]
ENSEMBLES = ("micro", "canonical", "laplace")


@dataclass
class ThermoCurve:
    """Per-atom energy, inverse temperature and order parameters.

    Rows are kept sorted by energy. For micro curves the two Jx columns hold
    the two parity-broken branches; for laplace curves they hold the
    epsilon -> 0- and epsilon -> 0+ limits.
    """

    ensemble: str
    n_atoms: int
    e_per_atom: np.ndarray
    beta: np.ndarray
    jz_per_atom: np.ndarray
    jx_plus_per_atom: np.ndarray
    jx_minus_per_atom: np.ndarray

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"unknown ensemble '{self.ensemble}'")
        arrays = [
            np.asarray(a, dtype=float)
            for a in (
                self.e_per_atom,
                self.beta,
                self.jz_per_atom,
                self.jx_plus_per_atom,
                self.jx_minus_per_atom,
            )
        ]
        if len({a.shape for a in arrays}) != 1:
            raise ValueError("ThermoCurve columns must have equal length")
        order = np.argsort(arrays[0], kind="stable")
        (
            self.e_per_atom,
            self.beta,
            self.jz_per_atom,
            self.jx_plus_per_atom,
            self.jx_minus_per_atom,
        ) = (a[order] for a in arrays)

    def __len__(self) -> int:
        return int(self.e_per_atom.size)

    def rows(self) -> list[list]:
        return [
            [e, b, z, xp, xm, self.ensemble]
            for e, b, z, xp, xm in zip(
                self.e_per_atom,
                self.beta,
                self.jz_per_atom,
                self.jx_plus_per_atom,
                self.jx_minus_per_atom,
            )
        ]

    def to_csv(self, path: Path) -> Path:
        return write_csv(path, CSV_COLUMNS, self.rows())

    @classmethod
    def from_csv(cls, path: Path, n_atoms: int) -> "ThermoCurve":
        header, rows = read_csv(path)
        if header != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        if not rows:
            raise ValueError(f"{path}: no rows")
        numeric = np.array([[float(v) for v in row[:5]] for row in rows])
        return cls(
            ensemble=rows[0][5],
            n_atoms=n_atoms,
            e_per_atom=numeric[:, 0],
            beta=numeric[:, 1],
            jz_per_atom=numeric[:, 2],
            jx_plus_per_atom=numeric[:, 3],
            jx_minus_per_atom=numeric[:, 4],
        )

    def interpolate(self, column: str, e_per_atom: np.ndarray) -> np.ndarray:
        """Linear interpolation of a column onto energies; nan outside the curve."""
        values = getattr(self, column)
        finite = np.isfinite(values) & np.isfinite(self.e_per_atom)
        if np.count_nonzero(finite) < 2:
            return np.full(np.shape(e_per_atom), np.nan)
        return np.interp(
            e_per_atom,
            self.e_per_atom[finite],
            values[finite],
            left=np.nan,
            right=np.nan,
        )
