"""
Gradient Report Service

체크포인트별 / 레이어별 / 부분집합별 dep·ind 그래디언트 노름 리포트
"""
import logging
from typing import Dict, Iterable, Optional, Sequence

import numpy as np
from tqdm import tqdm

from app.core.config import settings
from app.core.exceptions import MissingCheckpointError
from app.domain.graddecomp.decompose import grad_parts
from app.domain.graddecomp.schemas import GradDecompReport, GradNormRow, safe_log_ratio
from app.domain.net.checkpoint import CheckpointStore
from app.domain.synthdata.generator import one_hot
from app.domain.synthdata.schemas import PermutedDataset, Subset
from app.domain.synthdata.subsets import subset_inputs

logger = logging.getLogger(__name__)

GRAD_SUBSETS = (Subset.ALL, Subset.UNPERMUTED, Subset.PERMUTED)
SPREAD_WARNING = 100.0


def subset_grad_report(
    store: CheckpointStore,
    data: PermutedDataset,
    epochs: Optional[Iterable[int]] = None,
    subsets: Sequence[Subset] = GRAD_SUBSETS,
    centering: str = "train",
) -> GradDecompReport:
    """
    부분집합 전체(full-subset) 평균으로 dep / ind 그래디언트 노름 계산

    Args:
        store: CheckpointStore
        data: PermutedDataset
        epochs: 평가할 에폭 (기본값: 저장된 전체 에폭)
        subsets: 평가 부분집합 (그룹 라벨을 P_L 로 사용)
        centering: "train" 이면 ḡ 를 학습 전체로, "subset" 이면 평가 부분집합으로 평균

    Returns:
        GradDecompReport (없는 에폭은 missing_epochs 에 기록)
    """
    epochs = store.epochs if epochs is None else sorted(set(int(e) for e in epochs))
    report = GradDecompReport(
        metadata={
            "centering": centering,
            "averaging": "full-subset mean",
            "label_distribution": "one-hot train labels",
            "thresholds_note": "ratio thresholds are desk-scale operationalizations of qualitative trends",
        }
    )

    batches = {}
    for subset in subsets:
        inputs, labels = subset_inputs(data, subset)
        if inputs.shape[0] == 0:
            report.skipped_subsets.append(Subset(subset).value)
            logger.info("Gradient report: subset '%s' is empty, skipped", Subset(subset).value)
            continue
        batches[Subset(subset).value] = (inputs, one_hot(labels, data.n_classes))

    for epoch in tqdm(epochs, desc="grad-report", leave=False, disable=not settings.SHOW_PROGRESS):
        try:
            model = store.snapshot(epoch)
        except MissingCheckpointError:
            report.missing_epochs.append(epoch)
            logger.warning("Gradient report: no checkpoint for epoch %d, skipped", epoch)
            continue

        dep_norms: Dict[str, Dict[int, float]] = {}
        for name, (inputs, targets) in batches.items():
            centering_inputs = data.inputs if centering == "train" else inputs
            parts = grad_parts(model, inputs, targets, centering_inputs=centering_inputs)
            dep_norms[name] = {}
            for part in parts:
                dep_norm = float(np.linalg.norm(part.dep))
                ind_norm = float(np.linalg.norm(part.ind))
                ratio = safe_log_ratio(dep_norm, ind_norm)
                dep_norms[name][part.layer] = dep_norm
                report.rows.append(
                    GradNormRow(
                        epoch=epoch,
                        layer=part.layer,
                        subset=name,
                        dep_norm=dep_norm,
                        ind_norm=ind_norm,
                        total_norm=float(np.linalg.norm(part.total)),
                        log_dep_ind=ratio,
                        flagged=ratio is None,
                    )
                )

        unperm, perm = dep_norms.get(Subset.UNPERMUTED.value), dep_norms.get(Subset.PERMUTED.value)
        if unperm is not None and perm is not None:
            for r in report.rows:
                if r.epoch == epoch and r.layer in unperm:
                    r.log_dep_unperm_perm = safe_log_ratio(unperm[r.layer], perm[r.layer])

    return report


def layer_norm_spread(report: GradDecompReport, epoch: int, subset: str = Subset.ALL.value) -> float:
    """
    레이어 간 전체 그래디언트 노름의 max/min 비 (진단용, 100 초과 시 경고)
    """
    norms = [r.total_norm for r in report.select(epoch, subset)]
    if not norms:
        return float("nan")
    low = min(norms)
    spread = float("inf") if low <= 0 else max(norms) / low
    if spread > SPREAD_WARNING:
        logger.warning("Gradient norms across layers span %.1fx at epoch %d (%s)", spread, epoch, subset)
    return spread
