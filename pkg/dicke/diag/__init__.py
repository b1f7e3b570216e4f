"""Exact diagonalization of the j-sectors."""

from dicke.diag.hamiltonian import SectorBasis, build_hamiltonian
from dicke.diag.histogram import HistogramTable, histogram_observables
from dicke.diag.spectrum import SpectrumCache, all_spectra, diagonalize_sector, sector_spectrum

__all__ = [
    "SectorBasis",
    "build_hamiltonian",
    "SpectrumCache",
    "diagonalize_sector",
    "sector_spectrum",
    "all_spectra",
    "HistogramTable",
    "histogram_observables",
]
