"""Per-sector diagonalization and the persisted spectrum caches."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from dicke.core.errors import ConvergenceError
from dicke.core.model import ModelParams, SectorId
from dicke.core.storage import SpectrumStore
from dicke.core.utils import csv_text, parse_csv
from dicke.diag.hamiltonian import SectorBasis, build_hamiltonian, parity_diagonal, spin_operators

logger = logging.getLogger(__name__)

CACHE_COLUMNS = ["index", "eigenvalue", "jz", "jx", "parity"]


def spectrum_fingerprint(params: ModelParams, sector: SectorId, n_max: int) -> dict:
    fingerprint = params.fingerprint()
    fingerprint.update({"j": sector.j, "n_max": n_max})
    return fingerprint


@dataclass
class SpectrumCache:
    """Eigenvalues of one sector with per-eigenstate <Jz>, <Jx> and <parity>."""

    fingerprint: dict
    eigenvalues: np.ndarray
    jz: np.ndarray
    jx: np.ndarray
    parity: np.ndarray

    @property
    def j(self) -> float:
        return self.fingerprint["j"]

    @property
    def n_atoms(self) -> int:
        return self.fingerprint["n_atoms"]

    def to_text(self) -> str:
        rows = zip(range(self.eigenvalues.size), self.eigenvalues, self.jz, self.jx, self.parity)
        return csv_text(CACHE_COLUMNS, rows)

    @classmethod
    def from_text(cls, fingerprint: dict, text: str) -> "SpectrumCache":
        header, rows = parse_csv(text)
        if header != CACHE_COLUMNS:
            raise ValueError(f"unexpected spectrum cache header {header}")
        table = np.array([[float(v) for v in row[1:]] for row in rows], dtype=float)
        table = table.reshape(len(rows), 4)
        return cls(
            fingerprint=fingerprint,
            eigenvalues=table[:, 0],
            jz=table[:, 1],
            jx=table[:, 2],
            parity=table[:, 3],
        )


def diagonalize_sector(
    matrix: np.ndarray, basis: SectorBasis, fingerprint: Optional[dict] = None
) -> SpectrumCache:
    """Dense symmetric eigendecomposition with expectation values per eigenvector."""
    try:
        eigenvalues, vectors = scipy.linalg.eigh(matrix)
    except scipy.linalg.LinAlgError as e:
        raise ConvergenceError(
            f"eigensolver failed for sector j={basis.sector.j}",
            {"j": basis.sector.j, "n_max": basis.n_max, "reason": str(e)},
        ) from e

    jz_op, jx_op = spin_operators(basis.sector)
    spin_dim = basis.spin_dimension
    blocks = vectors.reshape(basis.n_max + 1, spin_dim, -1)
    weights = vectors**2
    jz = np.diag(jz_op) @ weights.reshape(basis.n_max + 1, spin_dim, -1).sum(axis=0)
    jx = np.einsum("nak,ab,nbk->k", blocks, jx_op, blocks)
    parity = parity_diagonal(basis) @ weights
    return SpectrumCache(
        fingerprint=fingerprint or {"j": basis.sector.j, "n_max": basis.n_max},
        eigenvalues=eigenvalues,
        jz=jz,
        jx=jx,
        parity=parity,
    )


def sector_spectrum(
    params: ModelParams,
    sector: SectorId,
    n_max: int,
    store: Optional[SpectrumStore] = None,
    refresh: bool = False,
) -> tuple[SpectrumCache, bool]:
    """Spectrum of one sector, loaded from the store when its fingerprint matches.

    Returns the cache and whether it came from the store. With refresh the
    stored file is dropped and the sector is diagonalized again.
    """
    fingerprint = spectrum_fingerprint(params, sector, n_max)
    if store is not None and refresh and store.delete(fingerprint):
        logger.debug("dropped cached spectrum for j=%s", sector.j)
    if store is not None:
        body = store.retrieve(fingerprint)
        if body is not None:
            return SpectrumCache.from_text(fingerprint, body), True

    basis = SectorBasis.create(sector, n_max)
    logger.debug("diagonalizing j=%s (dimension %d)", sector.j, basis.dimension)
    cache = diagonalize_sector(build_hamiltonian(sector, basis, params), basis, fingerprint)
    if store is not None:
        store.store(fingerprint, cache.to_text())
    return cache, False


def all_spectra(
    params: ModelParams,
    n_max: int,
    store: Optional[SpectrumStore] = None,
    threads: Optional[int] = None,
    refresh: bool = False,
) -> tuple[list[SpectrumCache], bool]:
    """Spectra of every sector in increasing j; the flag is True if all were cached."""
    sectors = SectorId.all_sectors(params.n_atoms)

    def run(sector: SectorId):
        return sector_spectrum(params, sector, n_max, store, refresh)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(run, sectors))
    return [cache for cache, _ in results], all(hit for _, hit in results)
