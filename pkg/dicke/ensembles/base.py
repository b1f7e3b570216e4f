"""Base ensemble class for dicke-thermo."""

from typing import Optional

import numpy as np
from pydantic import BaseModel

from dicke.core.model import ModelParams
from dicke.ensembles.thermo import ThermoCurve


class EnsembleBase:
    """Base ensemble class."""

    # Override this in subclasses to specify the ensemble tag
    ensemble: str = ""
    settings_class: type[BaseModel] = BaseModel

    def __init__(
        self,
        params: ModelParams,
        settings: Optional[BaseModel] = None,
        threads: Optional[int] = None,
    ):
        """Initialize the ensemble."""
        self.params = params
        self.settings = settings if settings is not None else self.settings_class()
        self.threads = threads
        self.validate_params()

    def validate_params(self) -> None:
        """Reject parameters the ensemble cannot handle."""

    def curve(self, grid: np.ndarray) -> ThermoCurve:
        """Evaluate the ensemble on a grid.

        The grid holds energies per atom for micro and inverse temperatures
        for canonical and laplace.
        """
        raise NotImplementedError
