"""
Layer Rewinding

최종 모델에서 레이어 하나만 과거 에폭 스냅샷으로 되돌리는 실험
"""
import logging
from typing import Iterable, Optional

from tqdm import tqdm

from app.core.config import settings
from app.core.exceptions import ConfigError, MemorizationLabError
from app.domain.experiments.schemas import RewindCell, RewindResult
from app.domain.net.checkpoint import CheckpointStore
from app.domain.net.schemas import FeedforwardModel
from app.domain.net.trainer import accuracy_by_subset
from app.domain.synthdata.schemas import PermutedDataset, Subset

logger = logging.getLogger(__name__)


def rewind_layer(final_model: FeedforwardModel, store: CheckpointStore, layer: int, epoch: int) -> FeedforwardModel:
    """
    레이어 l (1-based) 의 가중치만 epoch 스냅샷으로 교체한 복사본

    Raises:
        ConfigError: 레이어 범위 밖
        MissingCheckpointError: 스냅샷 없음
    """
    if not 1 <= layer <= final_model.n_layers:
        raise ConfigError(f"layer must be in [1, {final_model.n_layers}], got {layer}")
    snapshot = store.snapshot(epoch)
    rewound = final_model.copy()
    rewound.weights[layer - 1] = snapshot.weights[layer - 1].copy()
    if rewound.biases is not None and snapshot.biases is not None:
        rewound.biases[layer - 1] = snapshot.biases[layer - 1].copy()
    return rewound


def _summary(model: FeedforwardModel, data: PermutedDataset):
    acc = accuracy_by_subset(model, data)
    return acc.get(Subset.ALL.value), acc.get(Subset.TEST.value), acc.accuracies


def rewind_sweep(
    store: CheckpointStore,
    data: PermutedDataset,
    layers: Optional[Iterable[int]] = None,
    epochs: Optional[Iterable[int]] = None,
    final_epoch: Optional[int] = None,
    best_epoch: Optional[int] = None,
) -> RewindResult:
    """
    (layer, rewind epoch) 그리드 정확도

    셀 단위 실패는 error 로 기록하고 계속 진행한다.

    Args:
        store: CheckpointStore
        data: PermutedDataset
        layers: 되돌릴 레이어 (기본값: 전체 1..L)
        epochs: 되돌릴 에폭 (기본값: 저장된 전체)
        final_epoch: 기준 모델 에폭 (기본값: 마지막 스냅샷)
        best_epoch: best epoch 기준선 (선택)

    Returns:
        RewindResult
    """
    final_epoch = store.epochs[-1] if final_epoch is None else final_epoch
    final_model = store.snapshot(final_epoch)
    layers = list(range(1, final_model.n_layers + 1)) if layers is None else list(layers)
    epochs = store.epochs if epochs is None else list(epochs)

    train_acc, test_acc, _ = _summary(final_model, data)
    result = RewindResult(
        final_epoch=final_epoch,
        best_epoch=final_epoch if best_epoch is None else best_epoch,
        baseline_final={"train_acc": train_acc, "test_acc": test_acc},
    )
    if best_epoch is not None and best_epoch in store:
        best_train, best_test, _ = _summary(store.snapshot(best_epoch), data)
        result.baseline_best = {"train_acc": best_train, "test_acc": best_test}

    grid = [(l, e) for l in layers for e in epochs]
    for layer, epoch in tqdm(grid, desc="rewind", leave=False, disable=not settings.SHOW_PROGRESS):
        try:
            model = rewind_layer(final_model, store, layer, epoch)
            cell_train, cell_test, accuracies = _summary(model, data)
            result.cells.append(
                RewindCell(layer=layer, epoch=epoch, train_acc=cell_train, test_acc=cell_test, subset_acc=accuracies)
            )
        except MemorizationLabError as e:
            logger.warning("Rewind cell (layer %d, epoch %d) failed: %s", layer, epoch, e)
            result.cells.append(RewindCell(layer=layer, epoch=epoch, error=str(e)))
    return result
