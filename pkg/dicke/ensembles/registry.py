"""Ensemble registry for dicke-thermo."""

from typing import Type

from dicke.ensembles.base import EnsembleBase


class EnsembleRegistry:
    """Registry of ensemble implementations by tag."""

    _ensembles: dict[str, Type[EnsembleBase]] = {}

    @classmethod
    def register(cls, ensemble: str):
        """Decorator to register an ensemble."""

        def decorator(ensemble_class: Type[EnsembleBase]):
            cls._ensembles[ensemble] = ensemble_class
            return ensemble_class

        return decorator

    @classmethod
    def get(cls, ensemble: str) -> Type[EnsembleBase]:
        """Get the ensemble class for a tag."""
        if ensemble not in cls._ensembles:
            available = ", ".join(cls.list_ensembles())
            raise ValueError(f"No ensemble registered for: {ensemble} (available: {available})")
        return cls._ensembles[ensemble]

    @classmethod
    def list_ensembles(cls) -> list[str]:
        return list(cls._ensembles.keys())
