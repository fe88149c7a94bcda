"""
Checkpoint Store

에폭 → 불변 가중치 스냅샷 (메모리 + 선택적 디렉토리 영속화)
"""
import json
import logging
import threading
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from app.core.exceptions import ConfigError, MissingCheckpointError, StorageFormatError
from app.domain.net.schemas import FeedforwardModel, NetSpec
from app.infrastructure.storage.checkpoint_file import read_checkpoint, write_checkpoint

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


class CheckpointStore:
    """
    에폭별 가중치 스냅샷 저장소

    스냅샷은 한 번 쓰면 바뀌지 않는다 (읽기 전용 배열, 같은 에폭 재기록 거부).
    """

    def __init__(self, spec: NetSpec, seeds: Optional[Dict[str, int]] = None, directory: Union[str, Path, None] = None):
        self.spec = spec
        self.spec_hash = spec.spec_hash()
        self.seeds = dict(seeds or {})
        self.directory = Path(directory) if directory is not None else None
        self._snapshots: Dict[int, FeedforwardModel] = {}
        self._lock = threading.RLock()
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    @property
    def epochs(self) -> List[int]:
        with self._lock:
            return sorted(self._snapshots)

    def __contains__(self, epoch: int) -> bool:
        return epoch in self._snapshots

    def __len__(self) -> int:
        return len(self._snapshots)

    def put(self, model: FeedforwardModel, epoch: Optional[int] = None) -> None:
        """
        스냅샷 기록

        Raises:
            ConfigError: 이미 기록된 에폭
        """
        epoch = model.epoch if epoch is None else epoch
        with self._lock:
            if epoch in self._snapshots:
                raise ConfigError(f"Checkpoint for epoch {epoch} already written")
            snapshot = FeedforwardModel(
                weights=[_frozen(w) for w in model.weights],
                biases=None if model.biases is None else [_frozen(b) for b in model.biases],
                epoch=epoch,
            )
            self._snapshots[epoch] = snapshot
            if self.directory is not None:
                write_checkpoint(self._file(epoch), snapshot, self.spec_hash)
                self._write_manifest()

    def snapshot(self, epoch: int) -> FeedforwardModel:
        """읽기 전용 스냅샷 (공유 가능)"""
        with self._lock:
            if epoch not in self._snapshots:
                raise MissingCheckpointError(epoch)
            return self._snapshots[epoch]

    def get(self, epoch: int) -> FeedforwardModel:
        """쓰기 가능한 복사본"""
        return self.snapshot(epoch).copy()

    def latest(self) -> FeedforwardModel:
        if not self._snapshots:
            raise MissingCheckpointError(-1)
        return self.get(self.epochs[-1])

    def _file(self, epoch: int) -> Path:
        return self.directory / f"epoch_{epoch:05d}.mpc1"

    def _write_manifest(self) -> None:
        manifest = {
            "spec_hash": self.spec_hash,
            "spec": self.spec.model_dump(mode="json"),
            "seeds": self.seeds,
            "epochs": self.epochs,
        }
        (self.directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "CheckpointStore":
        """
        디렉토리에서 스냅샷 복원 (매니페스트 해시 검증)

        Raises:
            StorageFormatError: 매니페스트 누락 또는 해시 불일치
        """
        directory = Path(directory)
        manifest_path = directory / MANIFEST_NAME
        if not manifest_path.exists():
            raise StorageFormatError(f"Checkpoint manifest not found: {manifest_path}")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        spec = NetSpec.model_validate(manifest["spec"])
        if spec.spec_hash() != manifest["spec_hash"]:
            raise StorageFormatError("Checkpoint manifest hash does not match stored spec")

        store = cls(spec, seeds=manifest.get("seeds"))
        for epoch in manifest["epochs"]:
            model, file_hash = read_checkpoint(directory / f"epoch_{epoch:05d}.mpc1")
            if file_hash != store.spec_hash:
                raise StorageFormatError(f"Checkpoint epoch {epoch} belongs to a different spec")
            store.put(model, epoch)
        store.directory = directory
        logger.info("Loaded %d checkpoints from %s", len(store), directory)
        return store
