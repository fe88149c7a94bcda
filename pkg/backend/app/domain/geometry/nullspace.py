"""
Center Null-space Projection & Center Correlation

매니폴드 중심 간 공통 구조 제거 및 중심 상관 계산
"""
import logging
from typing import Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.domain.geometry.schemas import ManifoldSet, ProjectionMode
from app.domain.geometry.subspace import numerical_rank_basis

logger = logging.getLogger(__name__)


def orthogonalized_centers(centers: np.ndarray, rank_tol: float = None) -> np.ndarray:
    """
    중심 행렬의 대칭 직교화 (polar factor U·Vᵀ)

    각 q_i 는 원래 중심 c_i 에 가장 가까운 정규직교 방향이며 c_i·q_i > 0.
    이미 서로 직교인 중심은 정규화만 된다. 수치적 rank 가 P 보다 작으면
    rank 개의 특이방향만 사용한다.

    Args:
        centers: (P, N) 중심 행렬
        rank_tol: 상대 특이값 허용오차

    Returns:
        (P, N) 직교화된 중심 방향
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    u, s, vt = np.linalg.svd(centers, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros_like(centers)
    rank = int(np.sum(s > rank_tol * s[0]))
    return u[:, :rank] @ vt[:rank]


def _remove_row_spans(manifold_set: ManifoldSet, directions: np.ndarray, rank_tol: float):
    """매니폴드 i 에서 directions 의 i 번째를 뺀 나머지 행들의 span 을 제거"""
    projected = []
    ranks = []
    for i, m in enumerate(manifold_set.manifolds):
        q = numerical_rank_basis(np.delete(directions, i, axis=0), rank_tol)
        ranks.append(q.shape[0])
        projected.append(m - (m @ q.T) @ q)
    return projected, max(ranks)


def project_to_center_nullspace(
    manifold_set: ManifoldSet,
    mode: ProjectionMode = "others",
    rank_tol: float = None,
) -> ManifoldSet:
    """
    중심 null-space 투영

    - others: 매니폴드 i 에서 다른 매니폴드들의 (대칭 직교화된) 중심 span 을 제거.
      출력 중심들은 서로 직교하고, 출력에 다시 적용해도 변하지 않는다 (멱등).
    - others_raw: 매니폴드 i 에서 다른 매니폴드 원래 중심들의 span 을 제거 (1회 적용, 멱등 아님)
    - mean: 모든 매니폴드에서 평균 중심 방향 하나만 제거 (rank 1)
    - none: 항등

    ambient N ≤ P 이면 항등 + projection_skipped 플래그.

    Args:
        manifold_set: 입력 ManifoldSet
        mode: 투영 방식
        rank_tol: 상대 특이값 허용오차

    Returns:
        metadata 에 projection_mode / removed_rank / effective_ambient_dim 이 기록된 ManifoldSet
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    n_dim = manifold_set.ambient_dim
    n_manifolds = manifold_set.n_manifolds

    if mode not in ("others", "others_raw", "mean", "none"):
        raise ConfigError(f"Unknown projection mode: {mode}")

    if mode == "none":
        return manifold_set.replace(
            manifold_set.manifolds,
            projection_mode="none",
            projection_skipped=False,
            effective_ambient_dim=n_dim,
        )

    if n_dim <= n_manifolds:
        logger.warning(
            "Null-space projection skipped: ambient dim %d <= number of manifolds %d", n_dim, n_manifolds
        )
        return manifold_set.replace(
            manifold_set.manifolds,
            projection_mode=mode,
            projection_skipped=True,
            effective_ambient_dim=n_dim,
        )

    centers = manifold_set.centers

    if mode == "mean":
        mean_center = centers.mean(axis=0)
        scale = float(np.max(np.linalg.norm(centers, axis=1)))
        mean_norm = float(np.linalg.norm(mean_center))
        if scale == 0.0 or mean_norm <= rank_tol * scale:
            removed = 0
            projected = [m.copy() for m in manifold_set.manifolds]
        else:
            u = mean_center / mean_norm
            removed = 1
            projected = [m - np.outer(m @ u, u) for m in manifold_set.manifolds]
    elif mode == "others":
        projected, removed = _remove_row_spans(manifold_set, orthogonalized_centers(centers, rank_tol), rank_tol)
    else:
        projected, removed = _remove_row_spans(manifold_set, centers, rank_tol)

    return manifold_set.replace(
        projected,
        projection_mode=mode,
        projection_skipped=False,
        removed_rank=removed,
        effective_ambient_dim=n_dim - removed,
    )


def center_correlation(manifold_set: ManifoldSet, rank_tol: float = None) -> Tuple[float, int]:
    """
    중심 상관 ρ_center

    중심들에서 전역 평균을 뺀 뒤 모든 비순서쌍의 |cos| 평균.
    노름이 0 인 중심이 포함된 쌍은 건너뛴다.

    Args:
        manifold_set: ManifoldSet
        rank_tol: 0 노름 판정 상대 허용오차

    Returns:
        (rho_center, skipped_pairs)
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    centers = manifold_set.centers
    centered = centers - centers.mean(axis=0, keepdims=True)
    norms = np.linalg.norm(centered, axis=1)
    scale = float(np.max(np.linalg.norm(centers, axis=1)))

    valid = norms > rank_tol * scale if scale > 0 else np.zeros_like(norms, dtype=bool)
    n_manifolds = centers.shape[0]
    iu, ju = np.triu_indices(n_manifolds, k=1)
    keep = valid[iu] & valid[ju]
    skipped = int(np.sum(~keep))
    if skipped:
        logger.info("Center correlation skipped %d pair(s) with zero-norm centers", skipped)
    if not np.any(keep):
        return 0.0, skipped

    unit = np.zeros_like(centered)
    unit[valid] = centered[valid] / norms[valid, None]
    cosines = np.abs(np.sum(unit[iu[keep]] * unit[ju[keep]], axis=1))
    rho = float(np.clip(cosines.mean(), 0.0, 1.0))
    return rho, skipped
