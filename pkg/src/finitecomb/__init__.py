"""Finite-field additive combinatorics and incidence geometry over F_q, q prime."""

__version__ = "0.1.0"

from .errors import FiniteCombError
from .field import FSet, PrimeField, make_field

__all__ = ["FSet", "FiniteCombError", "PrimeField", "make_field", "__version__"]
