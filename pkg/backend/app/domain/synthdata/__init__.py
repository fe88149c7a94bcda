"""
Synthetic Sphere Dataset & Label Permutation
"""
from .schemas import ANALYSIS_SUBSETS, PermutedDataset, SphereDatasetSpec, Subset
from .generator import (
    class_center,
    generate_spheres,
    one_hot,
    permutation_count,
    permute_labels,
    sphere_basis,
    split_counts,
)
from .subsets import select_classes, subset_inputs, subset_manifolds, subset_rows

__all__ = [
    "ANALYSIS_SUBSETS",
    "PermutedDataset",
    "SphereDatasetSpec",
    "Subset",
    "class_center",
    "generate_spheres",
    "one_hot",
    "permutation_count",
    "permute_labels",
    "sphere_basis",
    "split_counts",
    "select_classes",
    "subset_inputs",
    "subset_manifolds",
    "subset_rows",
]
