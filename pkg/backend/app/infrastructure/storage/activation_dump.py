"""
Activation Dump (MFP1)

외부 모델 활성값 수집 경로: 매직, 버전, u32 P/M/N, 출처 문자열,
row-major f64 (P·M × N), i32 라벨 (P·M). CSV 대안 포맷은 `label,f0,f1,...` 헤더.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from app.core.exceptions import ConfigError, NonFinitePayloadError, StorageFormatError
from app.domain.geometry.schemas import ManifoldSet
from app.infrastructure.storage.binary import (
    BinaryReader,
    BinaryWriter,
    PathLike,
    require_finite,
    write_bytes,
)

logger = logging.getLogger(__name__)

MAGIC = b"MFP1"
VERSION = 1


@dataclass
class ActivationDump:
    """외부 활성값 행렬 + 라벨 + 출처"""
    points: np.ndarray
    labels: np.ndarray
    provenance: str = ""

    def to_manifold_set(self) -> ManifoldSet:
        return ManifoldSet.from_labels(self.points, self.labels, provenance=self.provenance)

    @classmethod
    def from_manifold_set(cls, manifold_set: ManifoldSet, provenance: str = "") -> "ActivationDump":
        points = np.vstack(manifold_set.manifolds)
        labels = np.concatenate(
            [np.full(m.shape[0], c, dtype=np.int64) for m, c in zip(manifold_set.manifolds, manifold_set.class_ids)]
        )
        return cls(points=points, labels=labels, provenance=provenance)


def write_activation_dump(dump: ActivationDump, path: PathLike, force: bool = False) -> Path:
    """
    MFP1 저장 (클래스별 행 수 M 이 모두 같아야 함)

    Raises:
        ConfigError: 클래스별 행 수 불일치
    """
    classes, counts = np.unique(dump.labels, return_counts=True)
    if counts.size == 0 or np.any(counts != counts[0]):
        raise ConfigError("MFP1 dumps need the same number of rows per class")
    order = np.argsort(dump.labels, kind="stable")

    writer = BinaryWriter(MAGIC, VERSION)
    writer.u32(classes.size).u32(int(counts[0])).u32(dump.points.shape[1])
    writer.text(dump.provenance)
    writer.array(dump.points[order], "f8")
    writer.array(dump.labels[order], "i4")
    return write_bytes(path, writer.getvalue(), force=force)


def read_activation_dump(path: PathLike) -> ActivationDump:
    """MFP1 로드"""
    reader = BinaryReader.from_path(path, MAGIC, VERSION)
    n_classes, per_class, dim = reader.u32(), reader.u32(), reader.u32()
    provenance = reader.text()
    rows = n_classes * per_class
    reader.expect_remaining(rows * dim * 8 + rows * 4)
    points = require_finite(reader.array((rows, dim), "f8"), "activation payload")
    labels = reader.array((rows,), "i4").astype(np.int64)
    if np.unique(labels).size != n_classes:
        raise StorageFormatError(f"Header declares {n_classes} classes, payload has {np.unique(labels).size}")
    return ActivationDump(points=points, labels=labels, provenance=provenance)


def write_activation_csv(dump: ActivationDump, path: PathLike, force: bool = False) -> Path:
    """CSV 대안 포맷 저장 (float 왕복 보존 위해 repr 정밀도)"""
    frame = pd.DataFrame(dump.points, columns=[f"f{i}" for i in range(dump.points.shape[1])])
    frame.insert(0, "label", dump.labels)
    content = frame.to_csv(index=False, float_format="%.17g")
    return write_bytes(path, content.encode("utf-8"), force=force)


def read_activation_csv(path: PathLike, provenance: str = "") -> ActivationDump:
    """CSV 대안 포맷 로드 (첫 열 label)"""
    frame = pd.read_csv(path, float_precision="round_trip")
    if "label" not in frame.columns:
        raise StorageFormatError(f"CSV dump {path} has no 'label' column")
    points = frame.drop(columns=["label"]).to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(points)):
        raise NonFinitePayloadError(f"CSV dump {path} contains non-finite values")
    return ActivationDump(points=points, labels=frame["label"].to_numpy(dtype=np.int64), provenance=provenance)


def ingest_activation_dump(path: PathLike) -> ManifoldSet:
    """
    활성값 덤프 → ManifoldSet (라벨별 그룹)

    확장자가 .csv 면 CSV, 그 외는 MFP1 로 읽는다.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        dump = read_activation_csv(path, provenance=path.name)
    else:
        dump = read_activation_dump(path)
    logger.info("Ingested %d rows x %d features from %s", dump.points.shape[0], dump.points.shape[1], path)
    return dump.to_manifold_set()
