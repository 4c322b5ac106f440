"""Exact symbolic calculus for graded polynomial charts: Koszul-signed
polynomial arithmetic, the jet-level exponential map between symmetric
tensors and differential operators, the induced flat structure on
form-valued fiber polynomials, and a generic homological perturbation
engine — all over exact rationals.
"""

from .chart import Chart, Truncation, koszul_sign
from .poly import GradedPoly
from .geometry import Connection, VectorField
from .enveloping import DiffOp, SymTensor
from .pbw import PbwContext
from .fedosov import FedosovData

__all__ = [
    "Chart", "Truncation", "koszul_sign", "GradedPoly", "Connection",
    "VectorField", "DiffOp", "SymTensor", "PbwContext", "FedosovData",
]

__version__ = "0.1.0"
