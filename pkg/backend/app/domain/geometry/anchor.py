"""
Anchor Solver

가우시안 드로우 T에 대한 앵커 포인트 s̃(T)

min_V ‖V − T‖² s.t. V·s_i ≤ 0 의 해는 Moreau 분해로
T − V* = coordsᵀα (α ≥ 0, 원뿔 위로의 사영) 이므로 NNLS 로 푼다.
앵커는 쌍대 가중치 α 를 정규화한 볼록 결합.
"""
from typing import Optional

import numpy as np
from scipy.optimize import nnls

from app.core.exceptions import AnchorSolveError
from app.domain.geometry.schemas import AnchorSample, SubspaceManifold


def solve_anchor(
    t_vec: np.ndarray,
    manifold: SubspaceManifold,
    draw_index: int = 0,
    manifold_index: Optional[int] = None,
    max_iter: Optional[int] = None,
) -> AnchorSample:
    """
    KKT 앵커 포인트 계산

    Args:
        t_vec: (D_sub+1,) 가우시안 드로우 (마지막 성분이 t0)
        manifold: 부분공간 매니폴드
        draw_index: 드로우 인덱스 (에러 컨텍스트)
        manifold_index: 매니폴드 인덱스 (에러 컨텍스트)
        max_iter: NNLS 반복 한도 (기본값 10·M)

    Returns:
        AnchorSample

    Raises:
        AnchorSolveError: 반복 한도 초과 또는 non-finite 입력
    """
    t_vec = np.asarray(t_vec, dtype=np.float64)
    coords = manifold.coords
    if t_vec.shape != (coords.shape[1],):
        raise AnchorSolveError(draw_index, manifold_index, f"t_vec shape {t_vec.shape} != ({coords.shape[1]},)")
    if not np.all(np.isfinite(t_vec)):
        raise AnchorSolveError(draw_index, manifold_index, "non-finite draw")

    projections = coords @ t_vec
    best = int(np.argmax(projections))

    # 모든 분리 제약을 이미 만족 -> 기여 0
    if projections[best] <= 0.0:
        return _inactive(t_vec, coords, best)

    max_iter = 10 * coords.shape[0] if max_iter is None else max_iter
    try:
        weights, _ = nnls(coords.T, t_vec, maxiter=max_iter)
    except RuntimeError as e:
        raise AnchorSolveError(draw_index, manifold_index, str(e)) from e

    total = float(weights.sum())
    if not np.isfinite(total) or total <= 0.0:
        return _inactive(t_vec, coords, best)

    hull_weights = weights / total
    anchor = hull_weights @ coords
    slack = max(float(t_vec @ anchor), 0.0)
    return AnchorSample(
        t_vec=t_vec,
        anchor=anchor,
        hull_weights=hull_weights,
        slack=slack,
        active=slack > 0.0,
    )


def _inactive(t_vec: np.ndarray, coords: np.ndarray, best: int) -> AnchorSample:
    hull_weights = np.zeros(coords.shape[0])
    hull_weights[best] = 1.0
    return AnchorSample(
        t_vec=t_vec,
        anchor=coords[best].copy(),
        hull_weights=hull_weights,
        slack=0.0,
        active=False,
    )
