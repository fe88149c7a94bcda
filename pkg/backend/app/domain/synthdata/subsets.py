"""
Example Subsets

unpermuted / permuted / restored / test 부분집합 행 선택과 매니폴드 구성
"""
import logging
from typing import Tuple, Union

import numpy as np

from app.core.exceptions import ConfigError, EmptySubsetError, InsufficientExamplesError
from app.domain.geometry.schemas import ManifoldSet
from app.domain.synthdata.schemas import PermutedDataset, Subset

logger = logging.getLogger(__name__)

_SUBSET_CODES = {
    Subset.UNPERMUTED: 0,
    Subset.PERMUTED: 1,
    Subset.RESTORED: 2,
    Subset.TEST: 3,
    Subset.ALL: 4,
}


def subset_rows(data: PermutedDataset, subset: Union[Subset, str]) -> Tuple[np.ndarray, np.ndarray]:
    """
    부분집합의 행 인덱스와 그룹 라벨

    - unpermuted / permuted: train_labels 로 그룹
    - restored / test: true_labels 로 그룹 (test 는 테스트 분할 기준 인덱스)
    - all: 학습 전체, train_labels

    Args:
        data: PermutedDataset
        subset: 부분집합

    Returns:
        (rows, grouping_labels)
    """
    subset = Subset(subset)
    if subset == Subset.TEST:
        return np.arange(data.n_test), data.test_labels
    if subset == Subset.ALL:
        return np.arange(data.n_train), data.train_labels
    if subset == Subset.UNPERMUTED:
        rows = np.flatnonzero(~data.permuted_mask)
        return rows, data.train_labels[rows]
    rows = np.flatnonzero(data.permuted_mask)
    if subset == Subset.PERMUTED:
        return rows, data.train_labels[rows]
    return rows, data.true_labels[rows]


def subset_inputs(data: PermutedDataset, subset: Union[Subset, str]) -> Tuple[np.ndarray, np.ndarray]:
    """부분집합 입력 행렬과 평가 라벨"""
    subset = Subset(subset)
    rows, labels = subset_rows(data, subset)
    source = data.test_inputs if subset == Subset.TEST else data.inputs
    return source[rows], labels


def select_classes(n_classes: int, p_sel: int, seed: int) -> np.ndarray:
    """시드로 고정된 P_sel 개 클래스 (오름차순) - 부분집합/에폭과 무관하게 동일"""
    if not 2 <= p_sel <= n_classes:
        raise ConfigError(f"P_sel must be in [2, {n_classes}], got {p_sel}")
    rng = np.random.default_rng([seed])
    return np.sort(rng.choice(n_classes, size=p_sel, replace=False))


def subset_manifolds(
    data: PermutedDataset,
    activations: np.ndarray,
    subset: Union[Subset, str],
    p_sel: int,
    m_sel: int,
    seed: int,
) -> ManifoldSet:
    """
    한 레이어 활성값에서 부분집합 매니폴드 구성

    Args:
        data: PermutedDataset
        activations: 부분집합이 속한 분할(학습 또는 테스트)과 행 정렬된 활성값
        subset: 부분집합
        p_sel: 선택 클래스 수
        m_sel: 클래스당 예시 수
        seed: 선택 시드

    Returns:
        ManifoldSet (class_ids 오름차순)

    Raises:
        EmptySubsetError: 부분집합이 비어 있음
        InsufficientExamplesError: m_sel 보다 적은 클래스가 있음
    """
    subset = Subset(subset)
    expected_rows = data.n_test if subset == Subset.TEST else data.n_train
    if activations.shape[0] != expected_rows:
        raise ConfigError(
            f"Activations have {activations.shape[0]} rows; subset '{subset.value}' needs {expected_rows}"
        )
    if m_sel < 1:
        raise ConfigError(f"M_sel must be >= 1, got {m_sel}")

    rows, groups = subset_rows(data, subset)
    if rows.size == 0:
        raise EmptySubsetError(subset.value)

    classes = select_classes(data.n_classes, p_sel, seed)
    members = {int(c): rows[groups == c] for c in classes}
    deficient = {c: int(r.size) for c, r in members.items() if r.size < m_sel}
    if deficient:
        raise InsufficientExamplesError(subset.value, m_sel, deficient)

    manifolds = []
    for c in classes:
        rng = np.random.default_rng([seed, int(c), _SUBSET_CODES[subset]])
        picked = np.sort(rng.choice(members[int(c)], size=m_sel, replace=False))
        manifolds.append(activations[picked])

    return ManifoldSet(
        manifolds=manifolds,
        class_ids=[int(c) for c in classes],
        metadata={"subset": subset.value, "m_sel": m_sel},
    )
