"""Dicke thermodynamics - microcanonical and canonical ensembles of the full Dicke model."""

__version__ = "0.1.0"
