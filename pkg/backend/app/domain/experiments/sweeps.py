"""
Sweeps

너비(double descent) 스윕, 라벨 노이즈 ε 스윕
"""
import logging
from typing import Optional, Sequence

from app.core.exceptions import ConfigError, MemorizationLabError
from app.domain.empirical.service import count_inversions
from app.domain.experiments.pipeline import layer_reports
from app.domain.experiments.schemas import ExperimentConfig, SweepResult, SweepRow
from app.domain.net.checkpoint import CheckpointStore
from app.domain.net.model import init_model
from app.domain.net.trainer import train
from app.domain.synthdata.generator import generate_spheres, permute_labels
from app.domain.synthdata.schemas import PermutedDataset, Subset

logger = logging.getLogger(__name__)

DEFAULT_WIDTH_FACTORS = (1 / 16, 1 / 8, 1 / 4, 1 / 2, 1, 2, 4)


def monotone_inversions(values: Sequence[float]) -> int:
    """단조 증가/감소 중 더 적게 어긋나는 쪽의 역전 수"""
    values = [v for v in values if v is not None]
    decreases = count_inversions(values)
    increases = count_inversions([-v for v in values])
    return min(decreases, increases)


def _train_and_probe(cfg: ExperimentConfig, data: PermutedDataset, layer: Optional[int], row: SweepRow) -> SweepRow:
    model = init_model(cfg.net)
    store = CheckpointStore(cfg.net, seeds=cfg.seeds())
    trace = train(model, data, cfg.train, store)
    probe_layer = cfg.net.n_layers - 1 if layer is None else layer

    row.layer_widths = list(cfg.net.layer_widths)
    row.parameter_count = cfg.net.parameter_count()
    row.best_epoch, row.final_epoch = trace.best_epoch, trace.final_epoch
    best, final = trace.record(trace.best_epoch), trace.record(trace.final_epoch)
    row.best_train_acc, row.final_train_acc = best.train_acc, final.train_acc
    row.best_test_acc, row.final_test_acc = best.test_acc, final.test_acc

    for tag, epoch in (("best", trace.best_epoch), ("final", trace.final_epoch)):
        reports = layer_reports(store.snapshot(epoch), data, cfg.analysis, epoch, [probe_layer], [Subset.TEST])
        if reports:
            setattr(row, f"{tag}_mgm", reports[0])
    return row


def width_sweep(
    base: ExperimentConfig,
    factors: Sequence[float] = DEFAULT_WIDTH_FACTORS,
    epsilon: float = 0.1,
    layer: Optional[int] = None,
) -> SweepResult:
    """
    은닉 폭 공통 배율 스윕

    폭마다 모델 하나를 학습하고 best / final 에폭의 테스트 매니폴드 MGM 을 측정.
    R_M, ρ_center 의 단조성 역전 수와 D_M 비단조 여부를 진단으로 기록.

    Args:
        base: 기준 설정
        factors: 폭 배율 (≥ 3개)
        epsilon: 라벨 노이즈
        layer: 측정 레이어 (기본값: 마지막 은닉층)

    Returns:
        SweepResult (kind="width")
    """
    if len(factors) < 3:
        raise ConfigError(f"width_sweep needs at least 3 width factors, got {len(factors)}")

    data = permute_labels(generate_spheres(base.dataset), epsilon, base.permutation_seed)
    result = SweepResult(kind="width")
    for factor in factors:
        row = SweepRow(factor=float(factor), epsilon=epsilon)
        try:
            cfg = base.model_copy(update={"net": base.net.scaled(factor), "epsilon": epsilon})
            logger.info("Width sweep: factor %.4g -> widths %s", factor, cfg.net.layer_widths)
            _train_and_probe(cfg, data, layer, row)
        except MemorizationLabError as e:
            logger.warning("Width factor %.4g failed: %s", factor, e)
            row.error = str(e)
        result.rows.append(row)

    ok = sorted((r for r in result.rows if r.final_mgm is not None), key=lambda r: r.parameter_count)
    d_inv = monotone_inversions([r.final_mgm.d_m for r in ok])
    result.diagnostics = {
        "r_m_inversions": monotone_inversions([r.final_mgm.r_m for r in ok]),
        "rho_center_inversions": monotone_inversions([r.final_mgm.rho_center for r in ok]),
        "d_m_inversions": d_inv,
        "d_m_non_monotone": d_inv > 0,
        "failed_factors": [r.factor for r in result.rows if r.error],
    }
    if d_inv > 0:
        logger.info("D_M vs width is non-monotone (%d inversion(s))", d_inv)
    for key in ("r_m_inversions", "rho_center_inversions"):
        if result.diagnostics[key] > 1:
            logger.warning("Width sweep: %s = %d", key, result.diagnostics[key])
    return result


def epsilon_sweep(base: ExperimentConfig, epsilons: Sequence[float], layer: Optional[int] = None) -> SweepResult:
    """
    라벨 노이즈 비율 스윕 (고정 폭)

    Args:
        base: 기준 설정
        epsilons: ε 목록
        layer: 측정 레이어 (기본값: 마지막 은닉층)

    Returns:
        SweepResult (kind="epsilon")
    """
    if not epsilons:
        raise ConfigError("epsilon_sweep needs at least one epsilon")

    clean = generate_spheres(base.dataset)
    result = SweepResult(kind="epsilon")
    for eps in epsilons:
        row = SweepRow(factor=1.0, epsilon=float(eps))
        try:
            cfg = base.model_copy(update={"epsilon": float(eps)})
            data = permute_labels(clean, float(eps), base.permutation_seed)
            _train_and_probe(cfg, data, layer, row)
        except MemorizationLabError as e:
            logger.warning("Epsilon %.3f failed: %s", eps, e)
            row.error = str(e)
        result.rows.append(row)

    ok = [r for r in result.rows if r.error is None]
    result.diagnostics = {
        "best_test_acc_inversions": count_inversions([-r.best_test_acc for r in ok]),
        "failed_epsilons": [r.epsilon for r in result.rows if r.error],
    }
    return result
