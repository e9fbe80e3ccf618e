"""Basepointed Khovanov complexes over GF(2) and decorated cobordism maps."""
from .f2core import F2Matrix, BigradedComplex, rank, solve, homology, graded_euler_characteristic, kernel_backend

__version__ = "0.1.0"

__all__ = [
    "F2Matrix",
    "BigradedComplex",
    "rank",
    "solve",
    "homology",
    "graded_euler_characteristic",
    "kernel_backend",
]
