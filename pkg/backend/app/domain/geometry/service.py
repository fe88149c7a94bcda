"""
Geometry Service

ManifoldSet → MgmReport 파이프라인
(null-space 투영 → 부분공간 → 몬테카를로 용량/반경/차원 → 중심 상관)
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from tqdm import tqdm

from app.core.config import settings
from app.core.exceptions import DegenerateManifoldError
from app.domain.geometry.capacity import manifold_radius_dimension, mft_capacity
from app.domain.geometry.nullspace import center_correlation, project_to_center_nullspace
from app.domain.geometry.schemas import GeometryConfig, ManifoldSet, MgmReport
from app.domain.geometry.subspace import build_subspace

logger = logging.getLogger(__name__)


@dataclass
class _ManifoldResult:
    inv_alpha: float
    std_error: float
    r_m: float
    d_m: float
    d_sub: int
    n_active: int
    degenerate: bool


def _analyze_manifold(points: np.ndarray, index: int, config: GeometryConfig) -> _ManifoldResult:
    try:
        subspace = build_subspace(points, config.rank_tol)
    except DegenerateManifoldError as e:
        raise DegenerateManifoldError(f"Manifold {index}: {e}") from e

    estimate = mft_capacity(subspace, config.n_samples, config.seed, manifold_index=index)
    r_m, d_m, degenerate = manifold_radius_dimension(estimate.samples)
    return _ManifoldResult(
        inv_alpha=estimate.inv_alpha,
        std_error=estimate.std_error,
        r_m=r_m,
        d_m=d_m,
        d_sub=subspace.d_sub,
        n_active=estimate.n_active,
        degenerate=degenerate,
    )


def analyze(manifold_set: ManifoldSet, config: Optional[GeometryConfig] = None) -> MgmReport:
    """
    MFTMA 기하 지표 계산

    매니폴드별 역용량은 산술 평균 후 역수(α_M = 1 / ⟨α_i⁻¹⟩),
    R_M / D_M 는 매니폴드별 값의 산술 평균.
    매니폴드 병렬 처리와 무관하게 인덱스 순서로 집계하므로 결과는 스레드 수에 독립.

    Args:
        manifold_set: 분석할 ManifoldSet
        config: GeometryConfig (기본값: settings 기반)

    Returns:
        MgmReport
    """
    config = config or GeometryConfig()
    rho, skipped_pairs = center_correlation(manifold_set, config.rank_tol)
    projected = project_to_center_nullspace(manifold_set, config.projection, config.rank_tol)

    n_manifolds = projected.n_manifolds

    def run(index: int) -> _ManifoldResult:
        return _analyze_manifold(projected.manifolds[index], index, config)

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        results = list(
            tqdm(
                pool.map(run, range(n_manifolds)),
                total=n_manifolds,
                desc="MFTMA",
                leave=False,
                disable=not settings.SHOW_PROGRESS,
            )
        )

    inv_alphas = np.array([r.inv_alpha for r in results])
    radii = np.array([r.r_m for r in results])
    dims = np.array([r.d_m for r in results])
    mean_inv = float(inv_alphas.mean())
    alpha_m = float("inf") if mean_inv <= 0 else 1.0 / mean_inv

    warnings = []
    m_min = min(m.shape[0] for m in manifold_set.manifolds)
    lower = 2.0 / m_min - config.bound_tolerance
    upper = 2.0 + config.bound_tolerance
    if not (lower <= alpha_m <= upper):
        msg = f"alpha_m={alpha_m:.4g} outside [{lower:.4g}, {upper:.4g}]"
        logger.warning("Capacity bound check: %s", msg)
        warnings.append(msg)

    degenerate = [i for i, r in enumerate(results) if r.degenerate]
    if degenerate:
        warnings.append(f"no active anchors for manifolds {degenerate}")

    metadata = {
        "projection_mode": projected.metadata.get("projection_mode"),
        "projection_skipped": projected.metadata.get("projection_skipped", False),
        "effective_ambient_dim": projected.metadata.get("effective_ambient_dim"),
        "skipped_center_pairs": skipped_pairs,
        "class_ids": list(manifold_set.class_ids),
        "alpha_per_manifold": [float("inf") if v <= 0 else 1.0 / v for v in inv_alphas.tolist()],
        "inv_alpha_std_error": [r.std_error for r in results],
        "r_per_manifold": radii.tolist(),
        "d_per_manifold": dims.tolist(),
        "d_sub_per_manifold": [r.d_sub for r in results],
        "degenerate_manifolds": degenerate,
        "warnings": warnings,
    }

    return MgmReport(
        alpha_m=alpha_m,
        r_m=float(radii.mean()),
        d_m=float(dims.mean()),
        rho_center=rho,
        n_gauss_samples=config.n_samples,
        seed=config.seed,
        metadata=metadata,
    )
