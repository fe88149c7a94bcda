"""
Network Schemas

NetSpec / TrainConfig (pydantic) + 모델/트레이스 타입
"""
import hashlib
import json
from dataclasses import dataclass
from typing import Dict, List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator


class NetSpec(BaseModel):
    """피드포워드 ReLU 네트워크 스펙"""
    layer_widths: List[int] = Field(
        default_factory=lambda: [1024] + [1024] * 5 + [100],
        description="(입력 D, 은닉 폭..., 출력 P)",
    )
    init_scheme: Literal["glorot_normal"] = Field(default="glorot_normal", description="초기화 방식")
    gain: float = Field(default=1.0, ge=0, description="초기화 표준편차 배율")
    use_bias: bool = Field(default=False, description="바이어스 사용 여부 (기본 off)")
    seed: int = Field(default=0, description="초기화 시드")

    @field_validator("layer_widths")
    @classmethod
    def _check_widths(cls, widths: List[int]) -> List[int]:
        if len(widths) < 2:
            raise ValueError(f"layer_widths needs at least input and output widths, got {widths}")
        if any(w < 1 for w in widths):
            raise ValueError(f"All widths must be >= 1, got {widths}")
        return widths

    @property
    def n_layers(self) -> int:
        """가중치 행렬 수 L"""
        return len(self.layer_widths) - 1

    def spec_hash(self) -> str:
        """스펙 sha256 (체크포인트 매니페스트용)"""
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def scaled(self, factor: float) -> "NetSpec":
        """모든 은닉 폭에 공통 배율 적용 (최소 1)"""
        widths = list(self.layer_widths)
        hidden = [max(1, int(round(w * factor))) for w in widths[1:-1]]
        return self.model_copy(update={"layer_widths": [widths[0], *hidden, widths[-1]]})

    def parameter_count(self) -> int:
        widths = self.layer_widths
        count = sum(a * b for a, b in zip(widths[:-1], widths[1:]))
        if self.use_bias:
            count += sum(widths[1:])
        return count


class TrainConfig(BaseModel):
    """학습 설정"""
    optimizer: Literal["adam", "gd"] = Field(default="adam", description="adam 또는 full-batch gd")
    learning_rate: float = Field(default=1e-4, gt=0, description="학습률")
    batch_size: int = Field(default=1024, ge=1, description="미니배치 크기 (gd 는 무시)")
    max_epochs: int = Field(default=1000, ge=1, description="최대 에폭")
    target_accuracy: float = Field(default=0.99, gt=0, le=1, description="조기 종료 학습 정확도 (초과 시 종료)")
    checkpoint_stride: int = Field(default=1, ge=1, description="스냅샷 간격 (에폭)")
    divergence_loss: float = Field(default=1e3, gt=0, description="발산 판정 loss")
    seed: int = Field(default=0, description="셔플 시드")


@dataclass
class FeedforwardModel:
    """가중치 (out, in) 행렬 목록 + 선택적 바이어스"""
    weights: List[np.ndarray]
    biases: Optional[List[np.ndarray]] = None
    epoch: int = 0

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def layer_widths(self) -> List[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def n_classes(self) -> int:
        return self.weights[-1].shape[0]

    def copy(self) -> "FeedforwardModel":
        return FeedforwardModel(
            weights=[w.copy() for w in self.weights],
            biases=None if self.biases is None else [b.copy() for b in self.biases],
            epoch=self.epoch,
        )


@dataclass
class ForwardPass:
    """
    순전파 결과

    post[0] 은 입력, post[l] (1 ≤ l < L) 은 은닉 ReLU 출력, post[L] 은 logits
    """
    pre: List[np.ndarray]
    post: List[np.ndarray]
    log_probs: np.ndarray
    probs: np.ndarray

    @property
    def logits(self) -> np.ndarray:
        return self.post[-1]


@dataclass
class Gradients:
    """레이어별 가중치(및 바이어스) 그래디언트"""
    weights: List[np.ndarray]
    biases: Optional[List[np.ndarray]] = None

    def norms(self) -> List[float]:
        return [float(np.linalg.norm(g)) for g in self.weights]


class EpochRecord(BaseModel):
    """에폭별 학습 기록"""
    epoch: int
    loss: float
    train_acc: float
    test_acc: float
    unpermuted_acc: Optional[float] = None
    permuted_acc: Optional[float] = None
    restored_acc: Optional[float] = None


class TrainingTrace(BaseModel):
    """학습 트레이스"""
    records: List[EpochRecord] = Field(default_factory=list)
    best_epoch: int = Field(default=0, description="테스트 정확도 최대 에폭 (동률이면 가장 이른 에폭)")
    final_epoch: int = Field(default=0)
    stopped_reason: str = Field(default="max_epochs")
    checkpoint_epochs: List[int] = Field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.records])

    def record(self, epoch: int) -> EpochRecord:
        for r in self.records:
            if r.epoch == epoch:
                return r
        raise KeyError(epoch)


class SubsetAccuracy(BaseModel):
    """부분집합별 정확도 (빈 부분집합은 omitted 에 기록)"""
    accuracies: Dict[str, float] = Field(default_factory=dict)
    omitted: List[str] = Field(default_factory=list)

    def get(self, subset: str) -> Optional[float]:
        return self.accuracies.get(subset)
