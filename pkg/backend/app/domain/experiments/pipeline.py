"""
Memorization Experiment Pipeline

데이터 생성 → 라벨 치환 → 학습/스냅샷 → 에폭·레이어·부분집합별 MFTMA → 그래디언트 리포트
"""
import logging
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from app.core.config import settings
from app.core.exceptions import EmptySubsetError, InsufficientExamplesError, OverwriteRefusedError
from app.domain.empirical.service import empirical_capacity
from app.domain.experiments.schemas import AnalysisSchedule, ExperimentBundle, ExperimentConfig
from app.domain.geometry.schemas import MgmReport
from app.domain.geometry.service import analyze
from app.domain.graddecomp.service import subset_grad_report
from app.domain.net.checkpoint import CheckpointStore
from app.domain.net.model import forward, init_model
from app.domain.net.schemas import FeedforwardModel
from app.domain.net.trainer import train
from app.domain.synthdata.generator import generate_spheres, permute_labels
from app.domain.synthdata.schemas import PermutedDataset, Subset
from app.domain.synthdata.subsets import subset_manifolds
from app.infrastructure.storage.run_dir import RunDirectory

logger = logging.getLogger(__name__)


def analysis_epochs(best: int, final: int, available: Sequence[int], n_log: int = 8) -> List[int]:
    """
    기본 분석 에폭: {0, best, final} ∪ [1, final] 로그 간격 n_log 개

    로그 간격 에폭은 가장 가까운 저장 에폭으로 맞춘다.

    Args:
        best: best epoch
        final: final epoch
        available: 스냅샷이 있는 에폭
        n_log: 로그 간격 중간 에폭 수

    Returns:
        오름차순 에폭 목록
    """
    available = sorted(set(int(e) for e in available))
    chosen = {e for e in (0, best, final) if e in available}
    if final >= 1 and n_log > 0 and available:
        grid = np.unique(np.round(np.geomspace(1, final, num=n_log)).astype(int))
        pool = np.array(available)
        for target in grid:
            chosen.add(int(pool[np.argmin(np.abs(pool - target))]))
    return sorted(chosen)


def prepare_data(cfg: ExperimentConfig) -> PermutedDataset:
    """설정대로 데이터셋 생성 + 라벨 치환"""
    return permute_labels(generate_spheres(cfg.dataset), cfg.epsilon, cfg.permutation_seed)


def layer_reports(
    model: FeedforwardModel,
    data: PermutedDataset,
    schedule: AnalysisSchedule,
    epoch: int,
    layers: Optional[Iterable[int]] = None,
    subsets: Optional[Iterable[Subset]] = None,
    skipped: Optional[List[Dict]] = None,
) -> List[MgmReport]:
    """
    모델 하나에 대한 레이어 × 부분집합 MgmReport

    빈 부분집합 / 예시 부족은 skipped 에 기록하고 건너뛴다.
    """
    train_post = forward(model, data.inputs).post
    test_post = forward(model, data.test_inputs).post
    layers = range(len(train_post)) if layers is None else layers
    subsets = schedule.subsets if subsets is None else subsets

    reports = []
    for layer in layers:
        for subset in subsets:
            subset = Subset(subset)
            activations = test_post[layer] if subset == Subset.TEST else train_post[layer]
            try:
                manifold_set = subset_manifolds(
                    data, activations, subset, schedule.p_sel, schedule.m_sel, schedule.selection_seed
                )
            except (EmptySubsetError, InsufficientExamplesError) as e:
                logger.info("Skipping epoch %d layer %d subset %s: %s", epoch, layer, subset.value, e)
                if skipped is not None:
                    skipped.append({"epoch": epoch, "layer": layer, "subset": subset.value, "reason": str(e)})
                continue

            report = analyze(manifold_set, schedule.geometry)
            update = {"epoch": epoch, "layer": layer, "subset": subset.value}
            if schedule.compute_empirical:
                emp = empirical_capacity(
                    manifold_set, schedule.empirical_trials, schedule.geometry.seed, schedule.geometry.threads
                )
                update["alpha_empirical"] = emp.alpha_empirical
            reports.append(report.model_copy(update=update))
    return reports


def run_memorization_experiment(cfg: ExperimentConfig, run_dir: Optional[RunDirectory] = None) -> ExperimentBundle:
    """
    기억화 실험 전체 실행

    단계 실패 시 run_dir 에 FAILED 마커를 남기고 (부분 산출물 유지) 예외를 다시 던진다.

    Args:
        cfg: ExperimentConfig
        run_dir: 산출물 디렉토리 (None 이면 파일 출력 없음)

    Returns:
        ExperimentBundle
    """
    stage = "setup"
    try:
        if run_dir is not None:
            run_dir.write_manifest(cfg.config_json(), cfg.seeds())

        stage = "data"
        data = prepare_data(cfg)

        stage = "train"
        model = init_model(cfg.net)
        ckpt_dir = run_dir.subdir("checkpoints") if run_dir is not None else None
        store = CheckpointStore(cfg.net, seeds=cfg.seeds(), directory=ckpt_dir)
        trace = train(model, data, cfg.train, store)
        if run_dir is not None:
            run_dir.write_csv("trace.csv", trace.to_frame())
            run_dir.write_json("trace.json", trace.model_dump(mode="json"))

        stage = "analyze"
        schedule = cfg.analysis
        epochs = schedule.epochs
        if epochs is None:
            epochs = analysis_epochs(trace.best_epoch, trace.final_epoch, store.epochs, schedule.n_log_epochs)
        else:
            epochs = sorted(set(epochs) | {trace.best_epoch, trace.final_epoch})
        epochs = [e for e in epochs if e in store]

        bundle = ExperimentBundle(
            config=cfg, data=data, model=model, store=store, trace=trace, analysis_epochs=epochs
        )
        for epoch in tqdm(epochs, desc="analyze", leave=False, disable=not settings.SHOW_PROGRESS):
            bundle.reports.extend(
                layer_reports(store.snapshot(epoch), data, schedule, epoch, schedule.layers, skipped=bundle.skipped)
            )
        if run_dir is not None:
            run_dir.write_csv("mgm.csv", bundle.mgm_frame())
            run_dir.write_json("mgm.json", [r.model_dump(mode="json") for r in bundle.reports])

        if schedule.grad_report:
            stage = "grad-report"
            bundle.grad_report = subset_grad_report(store, data, epochs, centering=schedule.grad_centering)
            if run_dir is not None:
                run_dir.write_csv("grad_report.csv", bundle.grad_report.to_frame())
                run_dir.write_json("grad_report.json", bundle.grad_report.model_dump(mode="json"))

        logger.info(
            "Experiment done: best epoch %d, final epoch %d, %d MGM reports",
            trace.best_epoch, trace.final_epoch, len(bundle.reports),
        )
        return bundle
    except OverwriteRefusedError:
        raise
    except Exception as e:
        if run_dir is not None:
            run_dir.mark_failed(stage, e)
        raise
