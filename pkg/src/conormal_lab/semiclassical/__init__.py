"""Quantization on the torus, defect measures and the two-sided bound check."""

from .bound import BoundCheckReport, bound_check
from .defect import (
    DefectMeasureEstimator,
    PairingResult,
    defect_pairing,
    estimate_defect_measure,
    pairing,
    richardson_limit,
)
from .quantization import Symbol, check_grid, lattice, min_grid, quantize_apply, torus_grid

__all__ = [
    "BoundCheckReport",
    "DefectMeasureEstimator",
    "PairingResult",
    "Symbol",
    "bound_check",
    "check_grid",
    "defect_pairing",
    "estimate_defect_measure",
    "lattice",
    "min_grid",
    "pairing",
    "quantize_apply",
    "richardson_limit",
    "torus_grid",
]
