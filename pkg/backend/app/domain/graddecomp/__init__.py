"""
Label-dependent / Label-independent Gradient Decomposition
"""
from .schemas import GradDecompReport, GradNormRow, GradParts, safe_log_ratio
from .decompose import (
    centering_term,
    decompose_loss,
    grad_parts,
    grad_parts_final_layer,
    grad_parts_layer,
    layer_jacobians,
)
from .service import GRAD_SUBSETS, layer_norm_spread, subset_grad_report

__all__ = [
    "GradDecompReport",
    "GradNormRow",
    "GradParts",
    "safe_log_ratio",
    "centering_term",
    "decompose_loss",
    "grad_parts",
    "grad_parts_final_layer",
    "grad_parts_layer",
    "layer_jacobians",
    "GRAD_SUBSETS",
    "layer_norm_spread",
    "subset_grad_report",
]
