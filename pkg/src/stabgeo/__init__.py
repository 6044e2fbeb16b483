"""Geometry, moments and simulation of multivariate stable laws."""
from .spectral import (
    StableModel,
    atoms_model,
    independent_model,
    isotropic_model,
    onesided_model,
    subgaussian_model,
    validate_model,
)

__all__ = [
    "StableModel",
    "atoms_model",
    "independent_model",
    "isotropic_model",
    "onesided_model",
    "subgaussian_model",
    "validate_model",
]
__version__ = "0.1.0"
