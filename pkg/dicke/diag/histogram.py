"""Degeneracy-weighted energy histograms of the exact spectra."""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from dicke.core.errors import DomainError
from dicke.core.utils import write_csv
from dicke.diag.spectrum import SpectrumCache
from dicke.ensembles.degeneracy import degeneracy_exact

HISTOGRAM_COLUMNS = [
    "e_per_n_bin_center",
    "jz_per_n",
    "jx_plus_per_n",
    "jx_minus_per_n",
    "count_weighted",
]
PHYSICAL_KEYS = ("omega", "omega0", "lambda", "n_atoms", "epsilon", "n_max")


@dataclass
class HistogramTable:
    """Per-bin weighted averages of the eigenstate observables, per atom."""

    centers: np.ndarray
    jz_per_atom: np.ndarray
    jx_plus_per_atom: np.ndarray
    jx_minus_per_atom: np.ndarray
    count_weighted: np.ndarray

    def rows(self) -> list[list[float]]:
        return [
            list(row)
            for row in zip(
                self.centers,
                self.jz_per_atom,
                self.jx_plus_per_atom,
                self.jx_minus_per_atom,
                self.count_weighted,
            )
        ]

    def to_csv(self, path: Path) -> Path:
        return write_csv(path, HISTOGRAM_COLUMNS, self.rows())


def _weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    total = weights.sum()
    if total <= 0:
        return math.nan
    return float(np.dot(values, weights) / total)


def histogram_observables(
    caches: list[SpectrumCache],
    n_atoms: int,
    bin_width: float = 0.05,
    split_by_jx_sign: bool = True,
    parity_tolerance: float = 1e-3,
    e_range: Optional[tuple[float, float]] = None,
) -> HistogramTable:
    """Bin eigenstates by E/N and average <Jz>/N, <Jx>/N with weights g(N, j).

    With the split flag the Jx columns average over states with positive and
    negative <Jx> respectively; parity-pure states (|<parity>| within tolerance
    of 1) enter both. Without it both columns hold the plain average.
    """
    if bin_width <= 0:
        raise DomainError(f"bin width must be positive, got {bin_width}")
    if not caches:
        raise DomainError("no spectra to histogram")
    reference = {k: caches[0].fingerprint.get(k) for k in PHYSICAL_KEYS}
    for cache in caches:
        if {k: cache.fingerprint.get(k) for k in PHYSICAL_KEYS} != reference:
            raise DomainError(f"spectrum for j={cache.j} was computed with different parameters")
        if cache.fingerprint.get("n_atoms") != n_atoms:
            raise DomainError(f"spectrum for j={cache.j} belongs to another N")

    energy = np.concatenate([c.eigenvalues for c in caches]) / n_atoms
    jz = np.concatenate([c.jz for c in caches]) / n_atoms
    jx = np.concatenate([c.jx for c in caches]) / n_atoms
    parity = np.concatenate([c.parity for c in caches])
    weight = np.concatenate(
        [np.full(c.eigenvalues.size, float(degeneracy_exact(n_atoms, c.j))) for c in caches]
    )
    if e_range is not None:
        keep = (energy >= e_range[0]) & (energy < e_range[1])
        energy, jz, jx, parity, weight = (a[keep] for a in (energy, jz, jx, parity, weight))
    if energy.size == 0:
        raise DomainError("no eigenstates in the requested energy range")

    bins = np.floor(energy / bin_width).astype(int)
    first, last = int(bins.min()), int(bins.max())
    pure = np.abs(parity) >= 1 - parity_tolerance
    rows = []
    for k in range(first, last + 1):
        members = bins == k
        w = weight[members]
        if not members.any():
            rows.append(((k + 0.5) * bin_width, math.nan, math.nan, math.nan, 0.0))
            continue
        jx_bin = jx[members]
        if split_by_jx_sign:
            plus = (jx_bin > 0) | pure[members]
            minus = (jx_bin < 0) | pure[members]
            jx_plus = _weighted_mean(jx_bin[plus], w[plus])
            jx_minus = _weighted_mean(jx_bin[minus], w[minus])
        else:
            jx_plus = jx_minus = _weighted_mean(jx_bin, w)
        rows.append(
            (
                (k + 0.5) * bin_width,
                _weighted_mean(jz[members], w),
                jx_plus,
                jx_minus,
                float(w.sum()),
            )
        )
    table = np.array(rows, dtype=float)
    return HistogramTable(
        centers=table[:, 0],
        jz_per_atom=table[:, 1],
        jx_plus_per_atom=table[:, 2],
        jx_minus_per_atom=table[:, 3],
        count_weighted=table[:, 4],
    )
