"""
Subspace Builder

포인트 클라우드를 (중심, 기저, 좌표) 표현으로 변환
"""
import numpy as np

from app.core.config import settings
from app.core.exceptions import ConfigError, DegenerateManifoldError
from app.domain.geometry.schemas import SubspaceManifold


def numerical_rank_basis(matrix: np.ndarray, rank_tol: float = None) -> np.ndarray:
    """
    행 공간의 정규직교 기저 (SVD, 최대 특이값 대비 rank_tol 이하 절단)

    Args:
        matrix: (k, N) 행렬
        rank_tol: 상대 특이값 허용오차

    Returns:
        (rank, N) 정규직교 행 기저
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    if matrix.size == 0:
        return np.zeros((0, matrix.shape[-1]))
    _, s, vt = np.linalg.svd(matrix, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, matrix.shape[1]))
    rank = int(np.sum(s > rank_tol * s[0]))
    return vt[:rank]


def build_subspace(points: np.ndarray, rank_tol: float = None) -> SubspaceManifold:
    """
    매니폴드 포인트를 부분공간 좌표로 표현

    center = 포인트 평균, basis = 중심화된 포인트의 수치적 span,
    coords = [basis 좌표, ‖center‖]

    Args:
        points: (M, N) 포인트 행렬
        rank_tol: 상대 특이값 허용오차

    Returns:
        SubspaceManifold

    Raises:
        ConfigError: 빈 행렬 또는 non-finite 값
        DegenerateManifoldError: 중심 노름이 0
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ConfigError(f"build_subspace needs an M x N matrix with M >= 1, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise ConfigError("build_subspace got non-finite points")

    center = points.mean(axis=0)
    center_norm = float(np.linalg.norm(center))
    if center_norm == 0.0:
        raise DegenerateManifoldError("Manifold center has zero norm; center coordinate undefined")

    centered = points - center[None, :]
    basis = numerical_rank_basis(centered, rank_tol)

    sub_coords = centered @ basis.T
    coords = np.empty((points.shape[0], basis.shape[0] + 1))
    coords[:, :-1] = sub_coords
    coords[:, -1] = center_norm
    return SubspaceManifold(center=center, basis=basis, coords=coords)
