"""
Synthetic Dataset Schemas
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


class Subset(str, Enum):
    """분석용 예시 부분집합"""
    UNPERMUTED = "unpermuted"
    PERMUTED = "permuted"
    RESTORED = "restored"
    TEST = "test"
    ALL = "all"


# 차트/리포트 고정 순서
ANALYSIS_SUBSETS = (Subset.UNPERMUTED, Subset.PERMUTED, Subset.RESTORED, Subset.TEST)


class SphereDatasetSpec(BaseModel):
    """구(sphere) 매니폴드 합성 데이터셋 스펙"""
    n_classes: int = Field(default=100, ge=2, description="클래스 수 P (짝수)")
    ambient_dim: int = Field(default=1024, ge=1, description="입력 차원 D")
    sphere_dim: int = Field(default=30, ge=1, description="구 부분공간 차원 d")
    radius: float = Field(default=5.0, ge=0, description="구 반경 r")
    samples_per_class: int = Field(default=500, ge=1, description="클래스당 학습 예시 수 M_train")
    test_per_class: Optional[int] = Field(default=None, ge=1, description="클래스당 테스트 예시 수 (기본: 전체의 10%)")
    seed: int = Field(default=0, ge=0, description="생성 시드 (MPD1 헤더에 u64 로 저장)")

    @model_validator(mode="after")
    def _check_invariants(self) -> "SphereDatasetSpec":
        if self.n_classes % 2 != 0:
            raise ValueError(f"n_classes must be even (opposed center pairs), got {self.n_classes}")
        if self.sphere_dim + 1 > self.ambient_dim:
            raise ValueError(
                f"sphere_dim + 1 must be <= ambient_dim, got d={self.sphere_dim}, D={self.ambient_dim}"
            )
        if self.n_classes // 2 > self.ambient_dim:
            raise ValueError(
                f"n_classes/2 orthogonal center directions do not fit in D={self.ambient_dim}"
            )
        return self

    @property
    def m_test(self) -> int:
        if self.test_per_class is not None:
            return self.test_per_class
        return max(1, int(round(self.samples_per_class / 9)))


@dataclass
class PermutedDataset:
    """라벨 치환이 적용된 학습/테스트 데이터"""
    inputs: np.ndarray
    true_labels: np.ndarray
    train_labels: np.ndarray
    permuted_mask: np.ndarray
    test_inputs: np.ndarray
    test_labels: np.ndarray
    n_classes: int
    epsilon: float = 0.0
    seed: int = 0
    spec: Optional[SphereDatasetSpec] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_train(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_test(self) -> int:
        return self.test_inputs.shape[0]

    @property
    def input_dim(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_permuted(self) -> int:
        return int(self.permuted_mask.sum())
