"""
Gradient Decomposition Schemas
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field


@dataclass
class GradParts:
    """레이어 하나의 label-dependent / label-independent 그래디언트"""
    layer: int
    dep: np.ndarray
    ind: np.ndarray
    subset: str = "batch"
    epoch: Optional[int] = None

    @property
    def total(self) -> np.ndarray:
        return self.dep + self.ind


class GradNormRow(BaseModel):
    """(epoch, layer, subset) 노름 행"""
    epoch: int
    layer: int
    subset: str
    dep_norm: float = Field(..., ge=0)
    ind_norm: float = Field(..., ge=0)
    total_norm: float = Field(..., ge=0)
    log_dep_ind: Optional[float] = Field(default=None, description="log(‖dep‖/‖ind‖), 둘 중 하나라도 ≤1e-300 이면 None")
    log_dep_unperm_perm: Optional[float] = Field(default=None, description="log(‖dep^unperm‖/‖dep^perm‖)")
    flagged: bool = Field(default=False, description="비율 계산 불가 표시")


class GradDecompReport(BaseModel):
    """그래디언트 분해 리포트"""
    rows: List[GradNormRow] = Field(default_factory=list)
    missing_epochs: List[int] = Field(default_factory=list)
    skipped_subsets: List[str] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        columns = list(GradNormRow.model_fields)
        return pd.DataFrame([r.model_dump() for r in self.rows], columns=columns)

    def select(self, epoch: int, subset: str) -> List[GradNormRow]:
        return sorted((r for r in self.rows if r.epoch == epoch and r.subset == subset), key=lambda r: r.layer)

    def row(self, epoch: int, layer: int, subset: str) -> GradNormRow:
        for r in self.rows:
            if (r.epoch, r.layer, r.subset) == (epoch, layer, subset):
                return r
        raise KeyError((epoch, layer, subset))


def safe_log_ratio(numerator: float, denominator: float, floor: float = 1e-300) -> Optional[float]:
    """두 노름이 모두 floor 보다 크면 log 비율, 아니면 None"""
    if numerator <= floor or denominator <= floor:
        return None
    return float(np.log(numerator / denominator))
