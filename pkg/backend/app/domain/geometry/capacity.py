"""
MFT Capacity

몬테카를로 역용량 추정, 앵커 반경/차원, α_Ball 적분
"""
import logging
import math
from typing import Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.stats import norm

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.domain.geometry.anchor import solve_anchor
from app.domain.geometry.schemas import AnchorSample, CapacityEstimate, SubspaceManifold

logger = logging.getLogger(__name__)


def gaussian_draws(dim: int, n_samples: int, seed: int, manifold_index: int = 0) -> np.ndarray:
    """(seed, manifold_index) 로 고정된 (n_samples, dim) 표준 가우시안 행렬"""
    rng = np.random.default_rng([seed, manifold_index])
    return rng.standard_normal((n_samples, dim))


def mft_capacity(
    manifold: SubspaceManifold,
    n_samples: int = None,
    seed: int = None,
    manifold_index: int = 0,
) -> CapacityEstimate:
    """
    매니폴드 하나의 MFT 역용량 ⟨[T·s̃]²₊ / ‖s̃‖²⟩ 추정

    Args:
        manifold: 부분공간 매니폴드
        n_samples: 가우시안 드로우 수
        seed: 시드
        manifold_index: 드로우 시드에 섞이는 매니폴드 인덱스

    Returns:
        CapacityEstimate (앵커 샘플 포함)
    """
    n_samples = settings.GAUSS_SAMPLES if n_samples is None else n_samples
    seed = settings.DEFAULT_SEED if seed is None else seed
    if n_samples < 1:
        raise ConfigError(f"n_samples must be >= 1, got {n_samples}")

    draws = gaussian_draws(manifold.d_sub + 1, n_samples, seed, manifold_index)
    samples = [
        solve_anchor(t, manifold, draw_index=k, manifold_index=manifold_index)
        for k, t in enumerate(draws)
    ]
    contributions = np.array([s.contribution for s in samples])
    return CapacityEstimate(
        inv_alpha=float(contributions.mean()),
        std_error=capacity_standard_error(samples),
        samples=samples,
    )


def capacity_standard_error(samples: Sequence[AnchorSample]) -> float:
    """역용량 몬테카를로 평균의 표준오차"""
    contributions = np.array([s.contribution for s in samples])
    if contributions.size < 2:
        return 0.0
    return float(contributions.std(ddof=1) / math.sqrt(contributions.size))


def manifold_radius_dimension(samples: Sequence[AnchorSample]) -> Tuple[float, float, bool]:
    """
    활성 앵커로부터 (R_M, D_M) 계산

    R_M² = ⟨‖s̃_sub‖² / s̃_c²⟩ (중심 좌표 제외, 중심 노름으로 정규화),
    D_M = ⟨(t⃗·ŝ)²⟩ (ŝ 는 부분공간 성분의 단위 벡터)

    Args:
        samples: AnchorSample 목록

    Returns:
        (r_m, d_m, degenerate) - 활성 샘플이 없으면 (0, 0, True)
    """
    active = [s for s in samples if s.active]
    if not active:
        return 0.0, 0.0, True

    radius_sq = np.empty(len(active))
    dim_terms = np.empty(len(active))
    for k, s in enumerate(active):
        sub = s.anchor[:-1]
        center_coord = s.anchor[-1]
        sub_norm = float(np.linalg.norm(sub))
        radius_sq[k] = (sub_norm / center_coord) ** 2
        dim_terms[k] = 0.0 if sub_norm == 0.0 else float(s.t_vec[:-1] @ sub / sub_norm) ** 2

    return float(math.sqrt(radius_sq.mean())), float(dim_terms.mean()), False


def alpha_ball(radius: float, dim: float) -> float:
    """
    D차원 반경 R 구(ball)의 용량

    α⁻¹ = ∫_{−∞}^{R√D} Dt (R√D − t)² / (R² + 1)

    Args:
        radius: R ≥ 0
        dim: D ≥ 0

    Returns:
        α_Ball(R, D)
    """
    if radius < 0 or dim < 0:
        raise ConfigError(f"alpha_ball needs R >= 0 and D >= 0, got R={radius}, D={dim}")

    a = radius * math.sqrt(dim)

    def integrand(t: float) -> float:
        return norm.pdf(t) * (a - t) ** 2

    left, _ = integrate.quad(integrand, -np.inf, 0.0, epsabs=1e-12, epsrel=1e-12)
    right = 0.0
    if a > 0:
        # 40 이후 가우시안 밀도는 배정밀도에서 0
        right, _ = integrate.quad(integrand, 0.0, min(a, 40.0), epsabs=1e-12, epsrel=1e-12, limit=200)
    return (radius * radius + 1.0) / (left + right)


def alpha_ball_closed_form(radius: float, dim: float) -> float:
    """α_Ball 닫힌 형태: (R²+1) / ((a²+1)Φ(a) + aφ(a)), a = R√D"""
    if radius < 0 or dim < 0:
        raise ConfigError(f"alpha_ball needs R >= 0 and D >= 0, got R={radius}, D={dim}")
    a = radius * math.sqrt(dim)
    inv = (a * a + 1.0) * norm.cdf(a) + a * norm.pdf(a)
    return (radius * radius + 1.0) / inv
