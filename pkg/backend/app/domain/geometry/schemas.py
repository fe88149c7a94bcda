"""
Geometry Schemas

매니폴드 집합, 부분공간 좌표, 앵커 샘플, MGM 리포트 타입 정의
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from app.core.config import settings
from app.core.exceptions import ConfigError

ProjectionMode = Literal["others", "others_raw", "mean", "none"]


@dataclass
class ManifoldSet:
    """P개의 라벨된 포인트 클라우드 (공통 특징 공간)"""
    manifolds: List[np.ndarray]
    class_ids: List[int]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.manifolds = [np.asarray(m, dtype=np.float64) for m in self.manifolds]
        self.class_ids = [int(c) for c in self.class_ids]

        if len(self.manifolds) < 2:
            raise ConfigError(f"ManifoldSet needs P >= 2 manifolds, got {len(self.manifolds)}")
        if len(self.class_ids) != len(self.manifolds):
            raise ConfigError("class_ids length must match number of manifolds")

        dims = set()
        for i, m in enumerate(self.manifolds):
            if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
                raise ConfigError(f"Manifold {i} must be a non-empty M x N matrix, got shape {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ConfigError(f"Manifold {i} contains non-finite values")
            dims.add(m.shape[1])
        if len(dims) != 1:
            raise ConfigError(f"All manifolds must share the ambient dimension, got {sorted(dims)}")

    @property
    def ambient_dim(self) -> int:
        return self.manifolds[0].shape[1]

    @property
    def n_manifolds(self) -> int:
        return len(self.manifolds)

    @property
    def centers(self) -> np.ndarray:
        """(P, N) 매니폴드 중심 행렬"""
        return np.stack([m.mean(axis=0) for m in self.manifolds])

    def replace(self, manifolds: Sequence[np.ndarray], **metadata: Any) -> "ManifoldSet":
        """같은 클래스 구성으로 데이터만 바꾼 새 ManifoldSet"""
        merged = {**self.metadata, **metadata}
        return ManifoldSet(manifolds=list(manifolds), class_ids=list(self.class_ids), metadata=merged)

    @classmethod
    def from_labels(cls, points: np.ndarray, labels: np.ndarray, **metadata: Any) -> "ManifoldSet":
        """
        행렬 + 라벨 배열로부터 라벨별로 묶은 ManifoldSet 생성

        Args:
            points: (n, N) 특징 행렬
            labels: (n,) 정수 라벨

        Returns:
            라벨 오름차순으로 정렬된 ManifoldSet
        """
        points = np.asarray(points, dtype=np.float64)
        labels = np.asarray(labels)
        classes = np.unique(labels)
        return cls(
            manifolds=[points[labels == c] for c in classes],
            class_ids=[int(c) for c in classes],
            metadata=dict(metadata),
        )


@dataclass
class SubspaceManifold:
    """
    중심 + 정규직교 기저 + 좌표 표현

    coords의 마지막 열은 모든 행에서 ‖center‖ (중심 방향 좌표)
    """
    center: np.ndarray
    basis: np.ndarray
    coords: np.ndarray

    @property
    def d_sub(self) -> int:
        return self.basis.shape[0]

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    @property
    def center_norm(self) -> float:
        return float(self.coords[0, -1])

    def reconstruct(self) -> np.ndarray:
        """center + coords·basis 로 원래 포인트 복원"""
        return self.center[None, :] + self.coords[:, :-1] @ self.basis


@dataclass
class AnchorSample:
    """가우시안 드로우 하나에 대한 앵커 포인트"""
    t_vec: np.ndarray
    anchor: np.ndarray
    hull_weights: np.ndarray
    slack: float
    active: bool

    @property
    def contribution(self) -> float:
        """역용량 기여분 slack² / ‖s̃‖² (비활성이면 0)"""
        if not self.active:
            return 0.0
        norm_sq = float(self.anchor @ self.anchor)
        return self.slack * self.slack / norm_sq


class GeometryConfig(BaseModel):
    """MFTMA 분석 설정"""
    n_samples: int = Field(default_factory=lambda: settings.GAUSS_SAMPLES, ge=1, description="매니폴드당 가우시안 드로우 수")
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, description="몬테카를로 시드")
    projection: ProjectionMode = Field(default="others", description="중심 null-space 투영 방식")
    threads: int = Field(default_factory=lambda: settings.NUM_THREADS, ge=1, description="매니폴드 병렬 처리 스레드 수")
    rank_tol: float = Field(default_factory=lambda: settings.RANK_TOL, gt=0, description="특이값 랭크 허용오차 (최대 특이값 대비)")
    bound_tolerance: float = Field(default=0.01, ge=0, description="용량 범위 경고 허용오차")


class MgmReport(BaseModel):
    """매니폴드 기하 지표 (MGM) 리포트"""
    alpha_m: float = Field(..., description="매니폴드 용량 (특징 차원당 매니폴드 수)")
    r_m: float = Field(..., ge=0, description="매니폴드 반경")
    d_m: float = Field(..., ge=0, description="매니폴드 차원")
    rho_center: float = Field(..., ge=0, le=1, description="중심 상관 평균 |cos|")
    alpha_empirical: Optional[float] = Field(default=None, description="경험적 용량 (선택)")
    n_gauss_samples: int = Field(..., description="몬테카를로 샘플 수")
    seed: int = Field(..., description="시드")
    epoch: Optional[int] = Field(default=None, description="에폭")
    layer: Optional[int] = Field(default=None, description="레이어 인덱스 (0 = 입력)")
    subset: Optional[str] = Field(default=None, description="예시 부분집합")
    metadata: Dict[str, Any] = Field(default_factory=dict, description="매니폴드별 값, 투영 차원, 경고 등")

    def to_row(self) -> Dict[str, Any]:
        """CSV 행 변환 (metadata 제외)"""
        return self.model_dump(exclude={"metadata"})


@dataclass
class CapacityEstimate:
    """매니폴드 하나의 몬테카를로 용량 추정"""
    inv_alpha: float
    std_error: float
    samples: List[AnchorSample]

    @property
    def alpha(self) -> float:
        return float("inf") if self.inv_alpha <= 0 else 1.0 / self.inv_alpha

    @property
    def n_active(self) -> int:
        return sum(1 for s in self.samples if s.active)
