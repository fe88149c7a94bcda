"""
Manifold Geometry (MFTMA)
"""
from .schemas import (
    AnchorSample,
    CapacityEstimate,
    GeometryConfig,
    ManifoldSet,
    MgmReport,
    SubspaceManifold,
)
from .subspace import build_subspace, numerical_rank_basis
from .anchor import solve_anchor
from .capacity import (
    alpha_ball,
    alpha_ball_closed_form,
    capacity_standard_error,
    manifold_radius_dimension,
    mft_capacity,
)
from .nullspace import center_correlation, orthogonalized_centers, project_to_center_nullspace
from .service import analyze

__all__ = [
    "AnchorSample",
    "CapacityEstimate",
    "GeometryConfig",
    "ManifoldSet",
    "MgmReport",
    "SubspaceManifold",
    "build_subspace",
    "numerical_rank_basis",
    "solve_anchor",
    "alpha_ball",
    "alpha_ball_closed_form",
    "capacity_standard_error",
    "manifold_radius_dimension",
    "mft_capacity",
    "center_correlation",
    "orthogonalized_centers",
    "project_to_center_nullspace",
    "analyze",
]
