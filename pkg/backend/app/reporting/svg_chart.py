"""
SVG Chart Generator

matplotlib (Agg) 로 결정적 SVG 차트 생성
같은 입력이면 바이트 단위로 같은 파일이 나오도록 해시 salt / 날짜 메타데이터를 고정한다.
"""
import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger(__name__)

# 부분집합 순서 / 색상 고정
SUBSET_ORDER: Tuple[str, ...] = ("unpermuted", "permuted", "restored", "test", "all")
SUBSET_COLORS: Dict[str, str] = {
    "unpermuted": "#1f77b4",
    "permuted": "#d62728",
    "restored": "#2ca02c",
    "test": "#ff7f0e",
    "all": "#7f7f7f",
}
AXIS_MARGIN = 0.05

plt.rcParams.update({
    "svg.hashsalt": "memorization-lab",
    "svg.fonttype": "none",
    "figure.figsize": (6.4, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
})

Series = Dict[str, Tuple[Sequence[float], Sequence[float]]]


def axis_limits(values: Sequence[float], margin: float = AXIS_MARGIN) -> Tuple[float, float]:
    """데이터 min/max 에 margin 비율 여백 (값이 하나뿐이면 ±0.5 또는 ±|v|·margin)"""
    finite = np.asarray([v for v in values if v is not None], dtype=np.float64)
    finite = finite[np.isfinite(finite)]
    if finite.size == 0:
        return 0.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    span = hi - lo
    if span == 0.0:
        pad = abs(lo) * margin if lo != 0.0 else 0.5
        return lo - pad, hi + pad
    return lo - margin * span, hi + margin * span


def ordered_keys(keys) -> list:
    """부분집합 이름은 고정 순서, 나머지는 이름순으로 뒤에"""
    keys = list(keys)
    known = [k for k in SUBSET_ORDER if k in keys]
    return known + sorted(k for k in keys if k not in SUBSET_ORDER)


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def line_chart(
    series: Series,
    path: Path,
    title: str,
    xlabel: str,
    ylabel: str,
) -> Optional[Path]:
    """
    선 그래프

    Args:
        series: 이름 → (x, y)
        path: 출력 SVG 경로
        title / xlabel / ylabel: 라벨

    Returns:
        저장 경로, 그릴 데이터가 없으면 None
    """
    kept = {}
    for name in ordered_keys(series):
        xs, ys = series[name]
        pairs = [(x, y) for x, y in zip(xs, ys) if y is not None and np.isfinite(y)]
        if not pairs:
            logger.info("Chart '%s': series '%s' is empty, skipped", title, name)
            continue
        kept[name] = pairs
    if not kept:
        logger.warning("Chart '%s' has no data, not written", title)
        return None

    fig, ax = plt.subplots()
    all_x, all_y = [], []
    for name, pairs in kept.items():
        xs, ys = zip(*pairs)
        all_x.extend(xs)
        all_y.extend(ys)
        ax.plot(xs, ys, marker="o", markersize=3, label=name, color=SUBSET_COLORS.get(name))
    ax.set_xlim(*axis_limits(all_x))
    ax.set_ylim(*axis_limits(all_y))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(loc="best", fontsize="small")
    return _save(fig, path)


def heat_grid(table: pd.DataFrame, path: Path, title: str, cmap: str = "viridis") -> Optional[Path]:
    """
    색상 격자 (행 × 열 테이블, 셀마다 값 표시)

    Args:
        table: index=행 라벨, columns=열 라벨
        path: 출력 SVG 경로
        title: 제목

    Returns:
        저장 경로, 비어 있으면 None
    """
    if table.empty or not np.isfinite(table.to_numpy(dtype=np.float64)).any():
        logger.warning("Heat grid '%s' has no data, not written", title)
        return None

    values = table.to_numpy(dtype=np.float64)
    fig, ax = plt.subplots()
    image = ax.imshow(np.ma.masked_invalid(values), cmap=cmap, aspect="auto", origin="lower")
    ax.set_xticks(range(values.shape[1]), [str(c) for c in table.columns])
    ax.set_yticks(range(values.shape[0]), [str(i) for i in table.index])
    ax.set_xlabel(str(table.columns.name or ""))
    ax.set_ylabel(str(table.index.name or ""))
    ax.grid(False)
    for (i, j), v in np.ndenumerate(values):
        if np.isfinite(v):
            ax.text(j, i, f"{v:.2f}", ha="center", va="center", fontsize=6, color="white")
    fig.colorbar(image, ax=ax)
    ax.set_title(title)
    return _save(fig, path)
