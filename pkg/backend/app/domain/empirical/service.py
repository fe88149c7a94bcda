"""
Empirical Capacity Service

특징 차원에 대한 이분 탐색으로 분리가능 비율 1/2 지점(N_critical)을 찾는다.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import ConfigError, NonMonotoneFractionError
from app.domain.geometry.schemas import ManifoldSet
from app.domain.empirical.schemas import DichotomyTrial, EmpiricalCapacityResult
from app.domain.empirical.separability import (
    all_dichotomies,
    is_separable,
    random_dichotomy,
    random_project,
)

logger = logging.getLogger(__name__)

TARGET_FRACTION = 0.5
FRACTION_TOL = 0.1
WIDEN_FACTOR = 4


def run_trial(manifold_set: ManifoldSet, n_features: int, seed: int, trial: int) -> DichotomyTrial:
    """(seed, n_features, trial) 로 사영과 dichotomy 를 모두 새로 뽑는 1회 시행"""
    rng = np.random.default_rng([seed, n_features, trial])
    labels = random_dichotomy(manifold_set.n_manifolds, rng)
    projected = random_project(manifold_set, n_features, seed=[seed, n_features, trial, 1])
    result = is_separable(projected, labels)
    return DichotomyTrial(
        labels=labels,
        n_features=n_features,
        separable=result.separable,
        margin_proxy=result.margin_proxy,
    )


def separable_fraction(
    manifold_set: ManifoldSet,
    n_features: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> Tuple[float, int]:
    """
    n_features 차원에서 분리가능한 무작위 dichotomy 비율

    Returns:
        (fraction, n_undecided) - undecided 시행은 분모에서 제외
    """
    def run(k: int) -> DichotomyTrial:
        return run_trial(manifold_set, n_features, seed, k)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        outcomes = list(pool.map(run, range(trials)))

    decided = [t for t in outcomes if not t.undecided]
    n_undecided = len(outcomes) - len(decided)
    if not decided:
        return 0.0, n_undecided
    return sum(1 for t in decided if t.separable) / len(decided), n_undecided


def exhaustive_separable_fraction(manifold_set: ManifoldSet, n_features: int, seed: int) -> float:
    """
    고정된 사영 하나에서 자명하지 않은 모든 dichotomy 의 분리가능 비율 (P ≤ ~12 용)

    사영은 시드로 고정된 N×N 가우시안 행렬의 앞 n 열을 쓰므로
    n 이 커질수록 분리가능 집합이 단조 증가한다.

    Args:
        manifold_set: ManifoldSet
        n_features: 사영 차원
        seed: 사영 시드

    Returns:
        분리가능 비율 (undecided 는 분리 불가로 계산)
    """
    n_dim = manifold_set.ambient_dim
    if not 1 <= n_features <= n_dim:
        raise ConfigError(f"n_features must be in [1, {n_dim}], got {n_features}")
    rng = np.random.default_rng([seed, n_dim])
    nested = rng.standard_normal((n_dim, n_dim))[:, :n_features] / np.sqrt(n_features)
    projected = manifold_set.replace([m @ nested for m in manifold_set.manifolds], projected_dim=n_features)

    dichotomies = all_dichotomies(manifold_set.n_manifolds)
    hits = sum(1 for labels in dichotomies if is_separable(projected, labels).separable)
    return hits / len(dichotomies)


def separable_fraction_curve(
    manifold_set: ManifoldSet,
    n_values: Sequence[int],
    trials: int,
    seed: int,
    threads: int = 1,
) -> pd.DataFrame:
    """n_features 별 분리가능 비율 표 (단조성 진단용)"""
    rows = []
    for n in n_values:
        fraction, undecided = separable_fraction(manifold_set, int(n), trials, seed, threads)
        rows.append({"n_features": int(n), "fraction": fraction, "undecided": undecided})
    return pd.DataFrame(rows, columns=["n_features", "fraction", "undecided"])


def count_inversions(values: Sequence[float], tolerance: float = 0.0) -> int:
    """인접 값이 tolerance 보다 크게 감소한 횟수"""
    values = list(values)
    return sum(1 for a, b in zip(values, values[1:]) if b < a - tolerance)


def empirical_capacity(
    manifold_set: ManifoldSet,
    trials_per_n: Optional[int] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    exhaustive: bool = False,
) -> EmpiricalCapacityResult:
    """
    이분 탐색으로 경험적 용량 α = P / N_critical 측정

    구간 [1, N] 에서 비율이 0.5 ± 0.1 안에 들어오거나 구간 폭이 1 이하가 되면 종료.
    인접한 n 사이에서 비율이 이 구간을 건너뛰면 0.5 에 가장 가까운 n 을 돌려주고 converged=False.
    비단조 추정이 나오면 시행 수를 한 번 4배로 늘려 재시도.

    Args:
        manifold_set: ManifoldSet
        trials_per_n: n당 dichotomy 시행 수 (≥ 10)
        seed: 시드
        threads: 시행 병렬 스레드 수
        exhaustive: True 면 샘플링 대신 모든 dichotomy 열거

    Returns:
        EmpiricalCapacityResult

    Raises:
        ConfigError: trials_per_n < 10
        NonMonotoneFractionError: 확장 후에도 비단조
    """
    trials_per_n = settings.DICHOTOMY_TRIALS if trials_per_n is None else trials_per_n
    seed = settings.DEFAULT_SEED if seed is None else seed
    threads = settings.NUM_THREADS if threads is None else threads
    if trials_per_n < 10:
        raise ConfigError(f"trials_per_n must be >= 10, got {trials_per_n}")

    try:
        return _bisect(manifold_set, trials_per_n, seed, threads, exhaustive, widened=False)
    except NonMonotoneFractionError as e:
        if exhaustive:
            raise
        logger.warning("%s; retrying with %d trials per n", e, trials_per_n * WIDEN_FACTOR)
        return _bisect(manifold_set, trials_per_n * WIDEN_FACTOR, seed, threads, exhaustive, widened=True)


def _bisect(
    manifold_set: ManifoldSet,
    trials: int,
    seed: int,
    threads: int,
    exhaustive: bool,
    widened: bool,
) -> EmpiricalCapacityResult:
    fractions: Dict[int, float] = {}
    undecided_total = 0

    def evaluate(n: int) -> float:
        nonlocal undecided_total
        if n not in fractions:
            if exhaustive:
                fractions[n] = exhaustive_separable_fraction(manifold_set, n, seed)
            else:
                frac, undecided = separable_fraction(manifold_set, n, trials, seed, threads)
                fractions[n] = frac
                undecided_total += undecided
        return fractions[n]

    def result(n: int, bracketed: bool = True) -> EmpiricalCapacityResult:
        converged = abs(fractions[n] - TARGET_FRACTION) <= FRACTION_TOL
        if bracketed and not converged:
            logger.warning(
                "Separable fraction jumps over %.1f +- %.1f; closest n=%d has fraction %.3f",
                TARGET_FRACTION, FRACTION_TOL, n, fractions[n],
            )
        return EmpiricalCapacityResult(
            alpha_empirical=manifold_set.n_manifolds / n,
            n_critical=n,
            frac_separable_at_critical=fractions[n],
            trials_per_n=trials,
            seed=seed,
            n_undecided=undecided_total,
            bracketed=bracketed,
            widened=widened,
            converged=converged,
            fractions=dict(sorted(fractions.items())),
        )

    lo, hi = 1, manifold_set.ambient_dim
    f_lo, f_hi = evaluate(lo), evaluate(hi)

    # n=1 에서 이미 0.4 이상이면 더 내려갈 곳이 없다 (0.6 초과면 converged=False)
    if f_lo >= TARGET_FRACTION - FRACTION_TOL:
        return result(lo)
    if f_hi < TARGET_FRACTION - FRACTION_TOL:
        logger.warning(
            "Separable fraction %.3f at full dimension %d; critical dimension not bracketed", f_hi, hi
        )
        return result(hi, bracketed=False)

    while hi - lo > 1:
        mid = (lo + hi) // 2
        f_mid = evaluate(mid)
        if f_mid < fractions[lo] - FRACTION_TOL or f_mid > fractions[hi] + FRACTION_TOL:
            raise NonMonotoneFractionError(
                f"Non-monotone separable fraction: f({lo})={fractions[lo]:.3f}, "
                f"f({mid})={f_mid:.3f}, f({hi})={fractions[hi]:.3f}"
            )
        if abs(f_mid - TARGET_FRACTION) <= FRACTION_TOL:
            return result(mid)
        if f_mid < TARGET_FRACTION:
            lo = mid
        else:
            hi = mid

    best = min((lo, hi), key=lambda n: (abs(fractions[n] - TARGET_FRACTION), n))
    return result(best)


def critical_from_scan(fractions: Dict[int, float]) -> int:
    """n → 비율 전체 스캔에서 0.5 에 가장 가까운 n (동률이면 작은 n)"""
    return min(fractions, key=lambda n: (abs(fractions[n] - TARGET_FRACTION), n))
