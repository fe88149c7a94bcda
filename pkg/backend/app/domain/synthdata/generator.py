"""
Sphere Dataset Generator

대척점 쌍 중심 ±e_k 위의 d차원 구 매니폴드 생성 + 라벨 치환
"""
import logging
from typing import Tuple

import numpy as np

from app.core.exceptions import ConfigError
from app.domain.synthdata.schemas import PermutedDataset, SphereDatasetSpec

logger = logging.getLogger(__name__)


def class_center(class_id: int, ambient_dim: int) -> np.ndarray:
    """클래스 2k → +e_k, 2k+1 → −e_k"""
    center = np.zeros(ambient_dim)
    center[class_id // 2] = 1.0 if class_id % 2 == 0 else -1.0
    return center


def sphere_basis(class_id: int, spec: SphereDatasetSpec, rng: np.random.Generator) -> np.ndarray:
    """
    클래스의 구 부분공간 기저 (d × D)

    첫 행은 중심 축 e_k, 나머지 d−1 행은 e_k 에 직교하는 무작위 정규직교 방향
    """
    axis = class_id // 2
    basis = np.zeros((spec.sphere_dim, spec.ambient_dim))
    basis[0, axis] = 1.0
    if spec.sphere_dim > 1:
        gauss = rng.standard_normal((spec.ambient_dim, spec.sphere_dim - 1))
        gauss[axis, :] = 0.0
        q, _ = np.linalg.qr(gauss)
        basis[1:] = q.T
    return basis


def _sample_sphere(
    center: np.ndarray, basis: np.ndarray, radius: float, count: int, rng: np.random.Generator
) -> np.ndarray:
    u = rng.standard_normal((count, basis.shape[0]))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return center[None, :] + radius * (u @ basis)


def generate_spheres(spec: SphereDatasetSpec) -> PermutedDataset:
    """
    합성 구 데이터셋 생성 (ε = 0)

    Args:
        spec: SphereDatasetSpec

    Returns:
        train_labels == true_labels 인 PermutedDataset (클래스 순서대로 정렬된 행)
    """
    rng = np.random.default_rng(spec.seed)
    m_train, m_test = spec.samples_per_class, spec.m_test

    train_blocks, test_blocks = [], []
    for class_id in range(spec.n_classes):
        center = class_center(class_id, spec.ambient_dim)
        basis = sphere_basis(class_id, spec, rng)
        train_blocks.append(_sample_sphere(center, basis, spec.radius, m_train, rng))
        test_blocks.append(_sample_sphere(center, basis, spec.radius, m_test, rng))

    labels = np.repeat(np.arange(spec.n_classes), m_train)
    test_labels = np.repeat(np.arange(spec.n_classes), m_test)
    logger.info(
        "Generated sphere dataset: P=%d D=%d d=%d r=%g train=%d test=%d",
        spec.n_classes, spec.ambient_dim, spec.sphere_dim, spec.radius, labels.size, test_labels.size,
    )
    return PermutedDataset(
        inputs=np.vstack(train_blocks),
        true_labels=labels,
        train_labels=labels.copy(),
        permuted_mask=np.zeros(labels.size, dtype=bool),
        test_inputs=np.vstack(test_blocks),
        test_labels=test_labels,
        n_classes=spec.n_classes,
        epsilon=0.0,
        seed=spec.seed,
        spec=spec,
    )


def permutation_count(epsilon: float, n_train: int) -> int:
    """round(ε·n) (half-up)"""
    return int(np.floor(epsilon * n_train + 0.5))


def permute_labels(data: PermutedDataset, epsilon: float, seed: int) -> PermutedDataset:
    """
    학습 예시 중 정확히 round(ε·n) 개의 라벨을 P 클래스 균등 무작위 라벨로 교체

    새 라벨이 원래 라벨과 같아도 치환된 예시로 취급한다.

    Args:
        data: 원본 데이터셋 (true_labels 기준으로 다시 치환)
        epsilon: 치환 비율 [0, 1]
        seed: 치환 시드

    Returns:
        새 PermutedDataset
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigError(f"epsilon must be in [0, 1], got {epsilon}")

    rng = np.random.default_rng(seed)
    n_perm = permutation_count(epsilon, data.n_train)
    chosen = rng.permutation(data.n_train)[:n_perm]

    mask = np.zeros(data.n_train, dtype=bool)
    mask[chosen] = True
    train_labels = data.true_labels.copy()
    train_labels[chosen] = rng.integers(0, data.n_classes, size=n_perm)

    kept = int(np.sum(train_labels[chosen] == data.true_labels[chosen]))
    logger.info("Permuted %d/%d labels (eps=%.3f); %d kept their true label", n_perm, data.n_train, epsilon, kept)

    return PermutedDataset(
        inputs=data.inputs,
        true_labels=data.true_labels,
        train_labels=train_labels,
        permuted_mask=mask,
        test_inputs=data.test_inputs,
        test_labels=data.test_labels,
        n_classes=data.n_classes,
        epsilon=float(epsilon),
        seed=data.seed,
        spec=data.spec,
        metadata={**data.metadata, "permutation_seed": seed},
    )


def one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    """정수 라벨 → one-hot 분포 P_L"""
    out = np.zeros((labels.size, n_classes))
    out[np.arange(labels.size), labels] = 1.0
    return out


def split_counts(data: PermutedDataset) -> Tuple[int, int, int]:
    """(unpermuted, permuted, test) 예시 수"""
    return data.n_train - data.n_permuted, data.n_permuted, data.n_test
