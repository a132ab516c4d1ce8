"""Numerical toolkit for finite-dimensional non-Hermitian quantum mechanics."""
from .errors import InputError, NHQMError, NumericalError
from .linalg_core import DEFAULT_TOL, BiorthogonalSpectrum, ToleranceConfig, eig_general
from .models import Brachistochrone

__all__ = [
    "BiorthogonalSpectrum",
    "Brachistochrone",
    "DEFAULT_TOL",
    "InputError",
    "NHQMError",
    "NumericalError",
    "ToleranceConfig",
    "eig_general",
]
__version__ = "0.1.0"
