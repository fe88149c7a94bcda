"""
Dataset Store (MPD1)

합성 데이터셋 바이너리 저장/로드 + CSV 내보내기
"""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from app.infrastructure.storage.binary import (
    BinaryReader,
    BinaryWriter,
    PathLike,
    require_finite,
    write_bytes,
)
from app.domain.synthdata.schemas import PermutedDataset, SphereDatasetSpec

logger = logging.getLogger(__name__)

MAGIC = b"MPD1"
VERSION = 1


def save_dataset(data: PermutedDataset, path: PathLike, force: bool = False) -> Path:
    """
    PermutedDataset 을 MPD1 컨테이너로 저장

    헤더: P, D, d, r, n_train, n_test, ε, seed
    페이로드: 학습 입력 f64, true/train 라벨 i32, 마스크 u8, 테스트 입력 f64, 테스트 라벨 i32
    """
    spec = data.spec
    writer = BinaryWriter(MAGIC, VERSION)
    writer.u32(data.n_classes).u32(data.input_dim)
    writer.u32(spec.sphere_dim if spec else 0).f64(spec.radius if spec else 0.0)
    writer.u32(data.n_train).u32(data.n_test)
    writer.f64(data.epsilon).u64(data.seed)
    writer.array(data.inputs, "f8")
    writer.array(data.true_labels, "i4")
    writer.array(data.train_labels, "i4")
    writer.array(data.permuted_mask, "u1")
    writer.array(data.test_inputs, "f8")
    writer.array(data.test_labels, "i4")
    out = write_bytes(path, writer.getvalue(), force=force)
    logger.info("Saved dataset to %s", out)
    return out


def load_dataset(path: PathLike) -> PermutedDataset:
    """MPD1 컨테이너 로드"""
    reader = BinaryReader.from_path(path, MAGIC, VERSION)
    n_classes, dim = reader.u32(), reader.u32()
    sphere_dim, radius = reader.u32(), reader.f64()
    n_train, n_test = reader.u32(), reader.u32()
    epsilon, seed = reader.f64(), reader.u64()

    reader.expect_remaining(n_train * dim * 8 + n_train * 4 * 2 + n_train + n_test * dim * 8 + n_test * 4)
    inputs = require_finite(reader.array((n_train, dim), "f8"), "train inputs")
    true_labels = reader.array((n_train,), "i4").astype(np.int64)
    train_labels = reader.array((n_train,), "i4").astype(np.int64)
    mask = reader.array((n_train,), "u1").astype(bool)
    test_inputs = require_finite(reader.array((n_test, dim), "f8"), "test inputs")
    test_labels = reader.array((n_test,), "i4").astype(np.int64)

    spec = None
    if sphere_dim > 0 and n_train % n_classes == 0 and n_test % n_classes == 0:
        spec = SphereDatasetSpec(
            n_classes=n_classes,
            ambient_dim=dim,
            sphere_dim=sphere_dim,
            radius=radius,
            samples_per_class=n_train // n_classes,
            test_per_class=n_test // n_classes,
            seed=seed,
        )

    return PermutedDataset(
        inputs=inputs,
        true_labels=true_labels,
        train_labels=train_labels,
        permuted_mask=mask,
        test_inputs=test_inputs,
        test_labels=test_labels,
        n_classes=n_classes,
        epsilon=epsilon,
        seed=seed,
        spec=spec,
    )


def dataset_frame(data: PermutedDataset) -> pd.DataFrame:
    """검사용 DataFrame (split, 라벨, 마스크, 특징 x0..)"""
    features = np.vstack([data.inputs, data.test_inputs])
    frame = pd.DataFrame(features, columns=[f"x{i}" for i in range(data.input_dim)])
    n_train, n_test = data.n_train, data.n_test
    frame.insert(0, "split", ["train"] * n_train + ["test"] * n_test)
    frame.insert(1, "true_label", np.concatenate([data.true_labels, data.test_labels]))
    frame.insert(2, "train_label", np.concatenate([data.train_labels, data.test_labels]))
    frame.insert(3, "permuted", np.concatenate([data.permuted_mask, np.zeros(n_test, dtype=bool)]))
    return frame


def export_dataset_csv(data: PermutedDataset, path: PathLike, force: bool = False) -> Path:
    """데이터셋 CSV 내보내기"""
    path = Path(path)
    content = dataset_frame(data).to_csv(index=False)
    return write_bytes(path, content.encode("utf-8"), force=force)
