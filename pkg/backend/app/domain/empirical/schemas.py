"""
Empirical Capacity Schemas
"""
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from pydantic import BaseModel, Field


@dataclass
class DichotomyTrial:
    """무작위 매니폴드 dichotomy 1회 시행 결과"""
    labels: np.ndarray
    n_features: int
    separable: Optional[bool]
    margin_proxy: float

    @property
    def undecided(self) -> bool:
        return self.separable is None


@dataclass
class SeparabilityResult:
    """LP 분리가능성 판정 결과 (separable=None 이면 undecided)"""
    separable: Optional[bool]
    margin_proxy: float
    slack_sum: float


class EmpiricalCapacityResult(BaseModel):
    """이분 탐색 기반 경험적 용량"""
    alpha_empirical: float = Field(..., description="P / N_critical")
    n_critical: int = Field(..., ge=1, description="임계 특징 수")
    frac_separable_at_critical: float = Field(..., ge=0, le=1, description="임계점에서 분리가능 비율")
    trials_per_n: int = Field(..., description="n당 시행 수 (확장 후 값)")
    seed: int = Field(..., description="시드")
    n_undecided: int = Field(default=0, description="LP 반복 한도로 판정 불가한 시행 수")
    bracketed: bool = Field(default=True, description="[1, N] 안에서 0.5 를 감쌌는지 여부")
    widened: bool = Field(default=False, description="비단조 추정으로 시행 수를 4배 확장했는지")
    converged: bool = Field(default=True, description="임계점 비율이 0.5 ± 0.1 안에 들어왔는지")
    fractions: Dict[int, float] = Field(default_factory=dict, description="평가한 n → 분리가능 비율")
