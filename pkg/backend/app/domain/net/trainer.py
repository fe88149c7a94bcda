"""
Trainer

라벨 치환 데이터셋 학습 루프 + 부분집합 정확도
"""
import logging
from typing import Optional

import numpy as np
from tqdm import tqdm

from app.core.config import settings
from app.core.exceptions import ConfigError, DivergenceError
from app.domain.net.checkpoint import CheckpointStore
from app.domain.net.model import cross_entropy, forward, loss_and_grad
from app.domain.net.optim import get_optimizer
from app.domain.net.schemas import EpochRecord, FeedforwardModel, SubsetAccuracy, TrainConfig, TrainingTrace
from app.domain.synthdata.generator import one_hot
from app.domain.synthdata.schemas import PermutedDataset, Subset

logger = logging.getLogger(__name__)


def accuracy_by_subset(model: FeedforwardModel, data: PermutedDataset) -> SubsetAccuracy:
    """
    부분집합별 정확도

    unpermuted / permuted / all 은 train_labels, restored / test 는 true_labels 로 평가.
    빈 부분집합은 omitted 로 표시.
    """
    train_pred = np.argmax(forward(model, data.inputs).logits, axis=1)
    test_pred = np.argmax(forward(model, data.test_inputs).logits, axis=1) if data.n_test else np.array([])
    return _subset_accuracy(train_pred, test_pred, data)


def _subset_accuracy(train_pred: np.ndarray, test_pred: np.ndarray, data: PermutedDataset) -> SubsetAccuracy:
    mask = data.permuted_mask
    hits_train = train_pred == data.train_labels
    hits_true = train_pred == data.true_labels

    candidates = {
        Subset.ALL.value: hits_train,
        Subset.UNPERMUTED.value: hits_train[~mask],
        Subset.PERMUTED.value: hits_train[mask],
        Subset.RESTORED.value: hits_true[mask],
        Subset.TEST.value: test_pred == data.test_labels,
    }
    result = SubsetAccuracy()
    for name, hits in candidates.items():
        if hits.size == 0:
            result.omitted.append(name)
        else:
            result.accuracies[name] = float(hits.mean())
    return result


def _evaluate(model: FeedforwardModel, data: PermutedDataset, targets: np.ndarray, epoch: int) -> EpochRecord:
    fp = forward(model, data.inputs)
    loss = cross_entropy(fp.log_probs, targets)
    train_pred = np.argmax(fp.logits, axis=1)
    test_pred = np.argmax(forward(model, data.test_inputs).logits, axis=1) if data.n_test else np.array([])
    acc = _subset_accuracy(train_pred, test_pred, data)
    return EpochRecord(
        epoch=epoch,
        loss=loss,
        train_acc=acc.accuracies[Subset.ALL.value],
        test_acc=acc.accuracies.get(Subset.TEST.value, float("nan")),
        unpermuted_acc=acc.get(Subset.UNPERMUTED.value),
        permuted_acc=acc.get(Subset.PERMUTED.value),
        restored_acc=acc.get(Subset.RESTORED.value),
    )


def train(
    model: FeedforwardModel,
    data: PermutedDataset,
    cfg: TrainConfig,
    store: Optional[CheckpointStore] = None,
) -> TrainingTrace:
    """
    학습 실행

    에폭 0 (초기 상태) 부터 기록/스냅샷하고, 학습 정확도가 target 을 넘거나
    max_epochs 에 도달하면 종료. 마지막 에폭은 항상 스냅샷.

    Args:
        model: 학습할 모델 (in-place 업데이트)
        data: PermutedDataset
        cfg: TrainConfig
        store: CheckpointStore (선택)

    Returns:
        TrainingTrace

    Raises:
        DivergenceError: loss > divergence_loss 또는 non-finite
    """
    if data.input_dim != model.weights[0].shape[1] or data.n_classes != model.n_classes:
        raise ConfigError(
            f"Model widths {model.layer_widths} do not match data (D={data.input_dim}, P={data.n_classes})"
        )

    targets = one_hot(data.train_labels, data.n_classes)
    optimizer = get_optimizer(cfg)
    batch_size = data.n_train if cfg.optimizer == "gd" else min(cfg.batch_size, data.n_train)

    trace = TrainingTrace()
    model.epoch = 0
    trace.records.append(_evaluate(model, data, targets, 0))
    if store is not None:
        store.put(model, 0)
        trace.checkpoint_epochs.append(0)

    epochs = tqdm(range(1, cfg.max_epochs + 1), desc="train", leave=False, disable=not settings.SHOW_PROGRESS)
    for epoch in epochs:
        rng = np.random.default_rng([cfg.seed, epoch])
        order = rng.permutation(data.n_train) if cfg.optimizer == "adam" else np.arange(data.n_train)
        for start in range(0, data.n_train, batch_size):
            idx = order[start:start + batch_size]
            loss, grads = loss_and_grad(model, data.inputs[idx], targets[idx])
            if not np.isfinite(loss) or loss > cfg.divergence_loss:
                raise DivergenceError(epoch, loss)
            optimizer.step(model, grads)

        model.epoch = epoch
        record = _evaluate(model, data, targets, epoch)
        trace.records.append(record)
        epochs.set_postfix(loss=f"{record.loss:.4f}", train=f"{record.train_acc:.3f}", test=f"{record.test_acc:.3f}")

        done = record.train_acc > cfg.target_accuracy
        if store is not None and (epoch % cfg.checkpoint_stride == 0 or done or epoch == cfg.max_epochs):
            store.put(model, epoch)
            trace.checkpoint_epochs.append(epoch)
        if done:
            trace.stopped_reason = "target_accuracy"
            break

    trace.final_epoch = model.epoch
    trace.best_epoch = _best_epoch(trace)
    logger.info(
        "Training finished at epoch %d (%s); best epoch %d", trace.final_epoch, trace.stopped_reason, trace.best_epoch
    )
    return trace


def _best_epoch(trace: TrainingTrace) -> int:
    best = trace.records[0]
    for r in trace.records[1:]:
        if r.test_acc > best.test_acc:
            best = r
    return best.epoch
