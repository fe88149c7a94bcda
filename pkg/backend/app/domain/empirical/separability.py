"""
Linear Separability

LP 기반 선형 분리가능성 판정, 무작위 사영, dichotomy 샘플링
"""
import logging
from typing import Optional, Sequence, Union

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.domain.geometry.schemas import ManifoldSet
from app.domain.empirical.schemas import SeparabilityResult

logger = logging.getLogger(__name__)

SLACK_TOL = 1e-8

SeedLike = Union[int, Sequence[int]]


def is_separable(
    manifold_set: ManifoldSet,
    labels: Sequence[int],
    max_iter: Optional[int] = None,
) -> SeparabilityResult:
    """
    바이어스 포함 초평면으로 모든 매니폴드 포인트를 라벨대로 분리할 수 있는지 판정

    min Σξ  s.t.  y_i (w·x_i + b) ≥ 1 − ξ_i,  ξ ≥ 0
    최적값이 1e-8 이하면 분리가능.

    Args:
        manifold_set: ManifoldSet
        labels: 매니폴드별 ±1 라벨
        max_iter: HiGHS 반복 한도

    Returns:
        SeparabilityResult (반복 한도 도달 시 separable=None)
    """
    labels = np.asarray(labels)
    if labels.shape != (manifold_set.n_manifolds,):
        raise ConfigError(f"Expected {manifold_set.n_manifolds} labels, got shape {labels.shape}")
    if not np.all(np.isin(labels, (-1, 1))):
        raise ConfigError("Dichotomy labels must be +1/-1")
    if np.all(labels == labels[0]):
        raise ConfigError("Dichotomy needs at least one +1 and one -1 label")

    max_iter = settings.LP_MAX_ITER if max_iter is None else max_iter
    points = np.vstack(manifold_set.manifolds)
    y = np.concatenate([np.full(m.shape[0], float(lab)) for m, lab in zip(manifold_set.manifolds, labels)])
    n_points, n_dim = points.shape

    # 변수 순서: [w (N), b, ξ (n_points)]
    signed = -(y[:, None] * points)
    a_ub = sparse.hstack(
        [sparse.csr_matrix(signed), sparse.csr_matrix(-y[:, None]), -sparse.identity(n_points, format="csr")],
        format="csr",
    )
    b_ub = -np.ones(n_points)
    cost = np.concatenate([np.zeros(n_dim + 1), np.ones(n_points)])
    bounds = [(None, None)] * (n_dim + 1) + [(0, None)] * n_points

    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs", options={"maxiter": max_iter})
    if res.status != 0 or res.x is None:
        logger.debug("LP undecided (status=%s): %s", res.status, res.message)
        return SeparabilityResult(separable=None, margin_proxy=float("nan"), slack_sum=float("nan"))

    w = res.x[:n_dim]
    b = res.x[n_dim]
    margins = y * (points @ w + b)
    slack_sum = float(res.fun)
    return SeparabilityResult(
        separable=slack_sum <= SLACK_TOL,
        margin_proxy=float(margins.min()),
        slack_sum=slack_sum,
    )


def random_project(
    manifold_set: ManifoldSet,
    n_features: int,
    seed: SeedLike,
    identity: bool = False,
) -> ManifoldSet:
    """
    가우시안 무작위 사영 (1/√n_features 스케일)

    Args:
        manifold_set: ManifoldSet
        n_features: 사영 차원 (1 ≤ n ≤ N)
        seed: 시드 (정수 또는 정수 시퀀스)
        identity: n_features == N 이면 사영 없이 그대로 반환

    Returns:
        사영된 ManifoldSet
    """
    n_dim = manifold_set.ambient_dim
    if not 1 <= n_features <= n_dim:
        raise ConfigError(f"n_features must be in [1, {n_dim}], got {n_features}")
    if identity and n_features == n_dim:
        return manifold_set

    rng = np.random.default_rng(seed)
    projection = rng.standard_normal((n_dim, n_features)) / np.sqrt(n_features)
    return manifold_set.replace([m @ projection for m in manifold_set.manifolds], projected_dim=n_features)


def random_dichotomy(n_manifolds: int, rng: np.random.Generator) -> np.ndarray:
    """균등 ±1 라벨 (모두 같은 라벨이면 재생성)"""
    while True:
        labels = rng.choice(np.array([-1, 1]), size=n_manifolds)
        if np.any(labels != labels[0]):
            return labels


def all_dichotomies(n_manifolds: int) -> np.ndarray:
    """자명하지 않은 모든 dichotomy (2^P − 2 개) 를 ±1 행렬로 반환"""
    codes = np.arange(1, 2 ** n_manifolds - 1)
    bits = (codes[:, None] >> np.arange(n_manifolds)[None, :]) & 1
    return np.where(bits == 1, 1, -1)
