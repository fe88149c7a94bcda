"""
경험적 용량 테스트

LP 분리가능성, dichotomy 열거, 이분 탐색, 이론값과의 비교
"""
import numpy as np
import pytest

from app.core.exceptions import ConfigError
from app.domain.empirical import (
    all_dichotomies,
    count_inversions,
    critical_from_scan,
    empirical_capacity,
    exhaustive_separable_fraction,
    is_separable,
    random_dichotomy,
    random_project,
    separable_fraction,
    separable_fraction_curve,
)
from app.domain.geometry import GeometryConfig, ManifoldSet, analyze


def _point_set(rng, n_points: int, dim: int) -> ManifoldSet:
    return ManifoldSet(manifolds=[rng.standard_normal((1, dim)) for _ in range(n_points)], class_ids=list(range(n_points)))


def _sphere_set(rng, n_manifolds: int, dim: int, sub_dim: int, radius: float, n_points: int) -> ManifoldSet:
    manifolds = []
    for _ in range(n_manifolds):
        center = rng.standard_normal(dim)
        center /= np.linalg.norm(center)
        basis = np.linalg.qr(rng.standard_normal((dim, sub_dim)))[0].T
        u = rng.standard_normal((n_points, sub_dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        manifolds.append(center + radius * u @ basis)
    return ManifoldSet(manifolds=manifolds, class_ids=list(range(n_manifolds)))


# ========================================
# LP 분리가능성
# ========================================

def test_separable_points():
    ms = ManifoldSet(manifolds=[np.array([[2.0, 0.0]]), np.array([[-2.0, 0.0]])], class_ids=[0, 1])
    result = is_separable(ms, [1, -1])
    assert result.separable is True
    assert result.slack_sum <= 1e-8
    assert result.margin_proxy >= 1.0 - 1e-7


def test_xor_is_not_separable():
    ms = ManifoldSet(
        manifolds=[np.array([[1.0, 1.0], [-1.0, -1.0]]), np.array([[1.0, -1.0], [-1.0, 1.0]])],
        class_ids=[0, 1],
    )
    result = is_separable(ms, [1, -1])
    assert result.separable is False
    assert result.slack_sum > 1e-8


def test_is_separable_rejects_bad_labels(rng):
    ms = _point_set(rng, 3, 4)
    with pytest.raises(ConfigError):
        is_separable(ms, [1, 1, 1])
    with pytest.raises(ConfigError):
        is_separable(ms, [1, 0, -1])
    with pytest.raises(ConfigError):
        is_separable(ms, [1, -1])


def test_small_and_large_spheres(rng):
    """작은 구는 분리가능, 큰 구는 불가능"""
    labels = random_dichotomy(40, np.random.default_rng(0))
    small = _sphere_set(rng, 40, 64, 5, 0.05, 10)
    large = _sphere_set(rng, 40, 64, 5, 5.0, 10)
    assert is_separable(small, labels).separable is True
    assert is_separable(large, labels).separable is False


# ========================================
# Dichotomy / 사영
# ========================================

def test_all_dichotomies_are_nontrivial():
    dich = all_dichotomies(4)
    assert dich.shape == (14, 4)
    assert len({tuple(row) for row in dich}) == 14
    assert np.all(np.abs(dich.sum(axis=1)) < 4)


def test_random_dichotomy_has_both_labels():
    rng = np.random.default_rng(0)
    for _ in range(50):
        labels = random_dichotomy(2, rng)
        assert set(labels.tolist()) == {-1, 1}


def test_random_project_is_seeded(rng):
    ms = _point_set(rng, 5, 30)
    a = random_project(ms, 10, seed=[3, 10])
    b = random_project(ms, 10, seed=[3, 10])
    assert a.ambient_dim == 10
    np.testing.assert_array_equal(a.manifolds[2], b.manifolds[2])
    assert random_project(ms, 30, seed=1, identity=True) is ms
    with pytest.raises(ConfigError):
        random_project(ms, 31, seed=1)


def test_random_projection_preserves_norms_on_average(rng):
    """1/√n 스케일 사영은 노름 제곱을 평균적으로 보존"""
    ms = _point_set(rng, 40, 400)
    projected = random_project(ms, 200, seed=0)
    before = np.array([np.sum(m ** 2) for m in ms.manifolds])
    after = np.array([np.sum(m ** 2) for m in projected.manifolds])
    assert np.mean(after / before) == pytest.approx(1.0, abs=0.1)


def test_random_projection_keeps_pairwise_distances(rng):
    """N=1024 → 200 사영: 임의의 쌍 100개 거리 왜곡이 30% 이내"""
    ms = _point_set(rng, 200, 1024)
    projected = random_project(ms, 200, seed=4)
    before = np.vstack(ms.manifolds)
    after = np.vstack(projected.manifolds)
    pairs = [rng.choice(before.shape[0], size=2, replace=False) for _ in range(100)]
    ratios = np.array([
        np.linalg.norm(after[i] - after[j]) / np.linalg.norm(before[i] - before[j]) for i, j in pairs
    ])
    assert np.all(np.abs(ratios - 1.0) <= 0.3)


def test_exhaustive_fraction_matches_cover_count(rng):
    """일반 위치의 4점 (바이어스 포함): n=1 에서 6/14, n=2 에서 12/14"""
    ms = _point_set(rng, 4, 6)
    assert exhaustive_separable_fraction(ms, 1, seed=0) == pytest.approx(6 / 14)
    assert exhaustive_separable_fraction(ms, 2, seed=0) == pytest.approx(12 / 14)
    assert exhaustive_separable_fraction(ms, 3, seed=0) == pytest.approx(1.0)


def test_separable_fraction_is_deterministic(rng):
    ms = _point_set(rng, 10, 20)
    first = separable_fraction(ms, 4, trials=20, seed=5)
    second = separable_fraction(ms, 4, trials=20, seed=5, threads=3)
    assert first == second


def test_separable_fraction_curve_columns(rng):
    ms = _point_set(rng, 8, 12)
    curve = separable_fraction_curve(ms, [1, 4, 12], trials=10, seed=0)
    assert list(curve.columns) == ["n_features", "fraction", "undecided"]
    assert curve["fraction"].iloc[-1] == pytest.approx(1.0)


def test_count_inversions_and_scan():
    assert count_inversions([0.1, 0.3, 0.2, 0.6, 0.5]) == 2
    assert count_inversions([0.1, 0.3, 0.25], tolerance=0.1) == 0
    assert critical_from_scan({1: 0.1, 2: 0.45, 3: 0.55, 4: 0.9}) == 2


# ========================================
# 이분 탐색
# ========================================

def test_empirical_capacity_of_points(rng):
    """P=30 점, N=60 → α ≈ 2"""
    ms = _point_set(rng, 30, 60)
    result = empirical_capacity(ms, trials_per_n=40, seed=0)
    assert result.bracketed
    assert result.alpha_empirical == pytest.approx(2.0, rel=0.2)
    assert result.n_critical in result.fractions


def test_exhaustive_bisection_agrees_with_scan(rng):
    """5점: f(1)=8/30, f(2)=20/30 로 0.5 ± 0.1 을 건너뜀"""
    ms = _point_set(rng, 5, 8)
    result = empirical_capacity(ms, trials_per_n=10, seed=0, exhaustive=True)
    scan = {n: exhaustive_separable_fraction(ms, n, seed=0) for n in range(1, 9)}
    assert scan[1] == pytest.approx(8 / 30)
    assert scan[2] == pytest.approx(20 / 30)
    assert result.n_critical == critical_from_scan(scan) == 2
    assert result.frac_separable_at_critical == pytest.approx(20 / 30)
    assert result.converged is False
    assert result.bracketed


def test_converged_when_fraction_lands_in_band(rng):
    """4점: f(1)=6/14 이 이미 0.5 ± 0.1 안"""
    result = empirical_capacity(_point_set(rng, 4, 6), trials_per_n=10, seed=0, exhaustive=True)
    assert result.n_critical == 1
    assert result.frac_separable_at_critical == pytest.approx(6 / 14)
    assert result.converged is True


def test_fraction_above_band_at_one_feature_is_flagged(rng):
    """2점은 n=1 에서 항상 분리 가능 → 0.6 초과, converged=False"""
    result = empirical_capacity(_point_set(rng, 2, 4), trials_per_n=10, seed=0, exhaustive=True)
    assert result.n_critical == 1
    assert result.frac_separable_at_critical == pytest.approx(1.0)
    assert result.converged is False


def test_empirical_capacity_requires_enough_trials(rng):
    with pytest.raises(ConfigError):
        empirical_capacity(_point_set(rng, 4, 6), trials_per_n=5)


def test_unbracketed_when_full_dimension_is_not_enough(rng):
    """N 이 너무 작으면 bracketed=False 로 n_critical = N"""
    ms = _sphere_set(rng, 12, 3, 2, 3.0, 8)
    result = empirical_capacity(ms, trials_per_n=10, seed=0)
    assert result.bracketed is False
    assert result.n_critical == 3


@pytest.mark.slow
def test_theory_matches_empirical_capacity(rng):
    """MFT 용량과 LP 경험적 용량이 25% 이내"""
    ms = _sphere_set(rng, 20, 120, 3, 0.5, 15)
    theory = analyze(ms, GeometryConfig(n_samples=300, seed=0, projection="none"))
    empirical = empirical_capacity(ms, trials_per_n=40, seed=0)
    assert abs(theory.alpha_m - empirical.alpha_empirical) / empirical.alpha_empirical <= 0.25
