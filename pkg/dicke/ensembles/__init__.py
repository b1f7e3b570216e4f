"""Ensemble system for dicke-thermo."""

# Import ensembles to register them
from dicke.ensembles import (
    canonical,  # noqa: F401
    laplace,  # noqa: F401
    micro,  # noqa: F401
)
from dicke.ensembles.base import EnsembleBase
from dicke.ensembles.registry import EnsembleRegistry
from dicke.ensembles.thermo import ThermoCurve

__all__ = ["EnsembleBase", "EnsembleRegistry", "ThermoCurve"]
