"""Exact descent statistics of conjugacy classes of the symmetric group."""

from .combinat import CycleType, class_size, partitions_of
from .descent import DescentPolynomial, descent_polynomial, eulerian_polynomial
from .poly import Polynomial

__all__ = [
    "CycleType",
    "DescentPolynomial",
    "Polynomial",
    "class_size",
    "descent_polynomial",
    "eulerian_polynomial",
    "partitions_of",
]

__version__ = "0.1.0"
