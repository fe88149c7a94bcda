"""
Empirical Manifold Capacity
"""
from .schemas import DichotomyTrial, EmpiricalCapacityResult, SeparabilityResult
from .separability import all_dichotomies, is_separable, random_dichotomy, random_project
from .service import (
    count_inversions,
    critical_from_scan,
    empirical_capacity,
    exhaustive_separable_fraction,
    separable_fraction,
    separable_fraction_curve,
)

__all__ = [
    "DichotomyTrial",
    "EmpiricalCapacityResult",
    "SeparabilityResult",
    "all_dichotomies",
    "is_separable",
    "random_dichotomy",
    "random_project",
    "count_inversions",
    "critical_from_scan",
    "empirical_capacity",
    "exhaustive_separable_fraction",
    "separable_fraction",
    "separable_fraction_curve",
]
