"""
Experiment Schemas

실험 설정 (JSON 로드 가능) + 리와인드/스윕 결과 타입
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.domain.geometry.schemas import GeometryConfig, MgmReport
from app.domain.graddecomp.schemas import GradDecompReport
from app.domain.net.checkpoint import CheckpointStore
from app.domain.net.schemas import FeedforwardModel, NetSpec, TrainConfig, TrainingTrace
from app.domain.synthdata.schemas import ANALYSIS_SUBSETS, PermutedDataset, SphereDatasetSpec, Subset


class AnalysisSchedule(BaseModel):
    """MFTMA / 그래디언트 분석 일정"""
    epochs: Optional[List[int]] = Field(default=None, description="분석 에폭 (None: 0, best, final + 로그 간격 8개)")
    n_log_epochs: int = Field(default=8, ge=0, description="로그 간격 중간 에폭 수")
    layers: Optional[List[int]] = Field(default=None, description="분석 레이어 (0 = 입력, L = logits; None: 전체)")
    subsets: List[Subset] = Field(default_factory=lambda: list(ANALYSIS_SUBSETS), description="MGM 부분집합")
    p_sel: int = Field(default=50, ge=2, description="분석 클래스 수")
    m_sel: int = Field(default=50, ge=1, description="클래스당 예시 수")
    selection_seed: int = Field(default=0, description="매니폴드 구성 시드 (실행 내 고정)")
    geometry: GeometryConfig = Field(default_factory=GeometryConfig, description="MFTMA 설정")
    compute_empirical: bool = Field(default=False, description="경험적 용량 계산 여부")
    empirical_trials: int = Field(default_factory=lambda: settings.DICHOTOMY_TRIALS, ge=10)
    grad_report: bool = Field(default=True, description="그래디언트 분해 리포트 생성 여부")
    grad_centering: Literal["train", "subset"] = Field(default="train", description="ḡ 평균 집합: train 또는 subset")


class ExperimentConfig(BaseModel):
    """기억화(memorization) 실험 전체 설정"""
    dataset: SphereDatasetSpec = Field(default_factory=SphereDatasetSpec)
    epsilon: float = Field(default=0.5, ge=0, le=1, description="라벨 치환 비율 ε")
    permutation_seed: int = Field(default=1, description="라벨 치환 시드")
    net: NetSpec = Field(default_factory=NetSpec)
    train: TrainConfig = Field(default_factory=TrainConfig)
    analysis: AnalysisSchedule = Field(default_factory=AnalysisSchedule)
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR, description="출력 디렉토리")

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        widths = self.net.layer_widths
        if widths[0] != self.dataset.ambient_dim or widths[-1] != self.dataset.n_classes:
            raise ValueError(
                f"net.layer_widths must start with D={self.dataset.ambient_dim} and end with "
                f"P={self.dataset.n_classes}, got {widths}"
            )
        if self.analysis.p_sel > self.dataset.n_classes:
            raise ValueError(f"analysis.p_sel={self.analysis.p_sel} exceeds P={self.dataset.n_classes}")
        if self.analysis.m_sel > self.dataset.m_test and Subset.TEST in self.analysis.subsets:
            raise ValueError(
                f"analysis.m_sel={self.analysis.m_sel} exceeds test examples per class ({self.dataset.m_test})"
            )
        if self.analysis.epochs is not None:
            stride = self.train.checkpoint_stride
            off_grid = [e for e in self.analysis.epochs if e != 0 and e % stride != 0]
            if off_grid:
                raise ValueError(f"analysis epochs {off_grid} are not on the checkpoint stride {stride}")
        if self.analysis.layers is not None:
            bad = [l for l in self.analysis.layers if not 0 <= l <= self.net.n_layers]
            if bad:
                raise ValueError(f"analysis layers {bad} outside [0, {self.net.n_layers}]")
        return self

    @classmethod
    def desk_default(cls, seed: int = 0) -> "ExperimentConfig":
        """데스크 규모 기본값: P=50, D=512, d=20, r=5, 클래스당 200, ε=0.5, 은닉 512×5"""
        dataset = SphereDatasetSpec(
            n_classes=50, ambient_dim=512, sphere_dim=20, radius=5.0,
            samples_per_class=200, test_per_class=50, seed=seed,
        )
        return cls(
            dataset=dataset,
            epsilon=0.5,
            permutation_seed=seed + 1,
            net=NetSpec(layer_widths=[512] + [512] * 5 + [50], seed=seed),
            train=TrainConfig(seed=seed, max_epochs=300),
            analysis=AnalysisSchedule(p_sel=50, m_sel=50, selection_seed=seed, geometry=GeometryConfig(seed=seed)),
        )

    @classmethod
    def full_scale(cls, seed: int = 0) -> "ExperimentConfig":
        """원 규모: P=100, D=1024, d=30, r=5, 클래스당 500, 은닉 1024×5"""
        dataset = SphereDatasetSpec(
            n_classes=100, ambient_dim=1024, sphere_dim=30, radius=5.0, samples_per_class=500, seed=seed,
        )
        return cls(
            dataset=dataset,
            epsilon=0.5,
            permutation_seed=seed + 1,
            net=NetSpec(layer_widths=[1024] + [1024] * 5 + [100], seed=seed),
            train=TrainConfig(seed=seed),
            analysis=AnalysisSchedule(p_sel=100, m_sel=50, selection_seed=seed, geometry=GeometryConfig(seed=seed)),
        )

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """
        JSON 설정 파일 로드

        Raises:
            ConfigError: 파일 없음 / 파싱 / 검증 실패
        """
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Config file not found: {path}")
        try:
            return cls.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ConfigError(f"Invalid config {path}: {e}") from e

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """모든 시드를 seed 기준으로 재설정한 복사본"""
        payload = self.model_dump(mode="json")
        payload["dataset"]["seed"] = seed
        payload["permutation_seed"] = seed + 1
        payload["net"]["seed"] = seed
        payload["train"]["seed"] = seed
        payload["analysis"]["selection_seed"] = seed
        payload["analysis"]["geometry"]["seed"] = seed
        return ExperimentConfig.model_validate(payload)

    def seeds(self) -> Dict[str, int]:
        return {
            "dataset": self.dataset.seed,
            "permutation": self.permutation_seed,
            "net": self.net.seed,
            "train": self.train.seed,
            "selection": self.analysis.selection_seed,
            "geometry": self.analysis.geometry.seed,
        }

    def config_json(self) -> Dict[str, Any]:
        return json.loads(self.model_dump_json())


class RewindCell(BaseModel):
    """리와인드 그리드 셀"""
    layer: int
    epoch: int
    train_acc: Optional[float] = None
    test_acc: Optional[float] = None
    subset_acc: Dict[str, float] = Field(default_factory=dict)
    error: Optional[str] = None


class RewindResult(BaseModel):
    """(layer, rewind epoch) → 정확도 그리드 + 기준선"""
    cells: List[RewindCell] = Field(default_factory=list)
    final_epoch: int
    best_epoch: int
    baseline_final: Dict[str, float] = Field(default_factory=dict)
    baseline_best: Dict[str, float] = Field(default_factory=dict)

    def cell(self, layer: int, epoch: int) -> RewindCell:
        for c in self.cells:
            if c.layer == layer and c.epoch == epoch:
                return c
        raise KeyError((layer, epoch))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"layer": c.layer, "epoch": c.epoch, "train_acc": c.train_acc, "test_acc": c.test_acc,
              **{f"{k}_acc": v for k, v in c.subset_acc.items() if k not in ("all", "test")},
              "error": c.error} for c in self.cells]
        )


class SweepRow(BaseModel):
    """너비 / ε 스윕 한 행"""
    factor: Optional[float] = None
    epsilon: Optional[float] = None
    layer_widths: List[int] = Field(default_factory=list)
    parameter_count: int = 0
    best_epoch: Optional[int] = None
    final_epoch: Optional[int] = None
    best_train_acc: Optional[float] = None
    final_train_acc: Optional[float] = None
    best_test_acc: Optional[float] = None
    final_test_acc: Optional[float] = None
    best_mgm: Optional[MgmReport] = None
    final_mgm: Optional[MgmReport] = None
    error: Optional[str] = None


class SweepResult(BaseModel):
    """스윕 결과 + 단조성 진단"""
    kind: str
    rows: List[SweepRow] = Field(default_factory=list)
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        records = []
        for r in self.rows:
            record = r.model_dump(exclude={"best_mgm", "final_mgm", "layer_widths"})
            record["layer_widths"] = "x".join(str(w) for w in r.layer_widths)
            for tag, mgm in (("best", r.best_mgm), ("final", r.final_mgm)):
                for key in ("alpha_m", "r_m", "d_m", "rho_center"):
                    record[f"{tag}_{key}"] = getattr(mgm, key) if mgm is not None else None
            records.append(record)
        return pd.DataFrame(records)


@dataclass
class ExperimentBundle:
    """run_memorization_experiment 산출물"""
    config: ExperimentConfig
    data: PermutedDataset
    model: FeedforwardModel
    store: CheckpointStore
    trace: TrainingTrace
    reports: List[MgmReport] = field(default_factory=list)
    grad_report: Optional[GradDecompReport] = None
    analysis_epochs: List[int] = field(default_factory=list)
    skipped: List[Dict[str, Any]] = field(default_factory=list)

    def mgm_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_row() for r in self.reports])

    def report(self, epoch: int, layer: int, subset: str) -> MgmReport:
        for r in self.reports:
            if (r.epoch, r.layer, r.subset) == (epoch, layer, subset):
                return r
        raise KeyError((epoch, layer, subset))
