"""
SVG 차트 리포트 테스트
"""
import pandas as pd
import pytest

from app.core.exceptions import StorageFormatError
from app.reporting import ReportExportService
from app.reporting.svg_chart import axis_limits, heat_grid, line_chart, ordered_keys


def _write(frame: pd.DataFrame, path):
    frame.to_csv(path, index=False)


@pytest.fixture
def run_dir(tmp_path):
    """trace / mgm / grad / rewind / width sweep CSV 가 있는 실행 디렉토리"""
    _write(pd.DataFrame({
        "epoch": [0, 1, 2],
        "loss": [1.4, 1.1, 0.8],
        "train_acc": [0.25, 0.5, 0.75],
        "test_acc": [0.25, 0.4, 0.5],
        "unpermuted_acc": [0.25, 0.6, 0.9],
        "permuted_acc": [0.2, 0.3, 0.6],
        "restored_acc": [0.3, 0.3, 0.2],
    }), tmp_path / "trace.csv")
    _write(pd.DataFrame({
        "epoch": [0, 0, 5, 5],
        "layer": [0, 1, 0, 1],
        "subset": ["test"] * 4,
        "alpha_m": [0.2, 0.3, 0.25, 0.4],
        "r_m": [1.0, 0.9, 0.8, 0.7],
        "d_m": [3.0, 2.5, 2.0, 1.5],
        "rho_center": [0.1, 0.2, 0.1, 0.3],
    }), tmp_path / "mgm.csv")
    _write(pd.DataFrame({
        "epoch": [0] * 6,
        "layer": [1, 2] * 3,
        "subset": ["all", "all", "unpermuted", "unpermuted", "permuted", "permuted"],
        "log_dep_ind": [0.1, 0.2, 0.3, 0.4, -0.1, -0.2],
        "log_dep_unperm_perm": [0.5, 0.6, 0.5, 0.6, 0.5, 0.6],
    }), tmp_path / "grad_report.csv")
    _write(pd.DataFrame({
        "layer": [1, 1, 2, 2],
        "epoch": [0, 3, 0, 3],
        "train_acc": [0.3, 0.9, 0.5, 0.9],
        "test_acc": [0.2, 0.5, 0.4, 0.5],
        "error": [None] * 4,
    }), tmp_path / "rewind.csv")
    _write(pd.DataFrame({
        "factor": [0.5, 1.0, 2.0],
        "parameter_count": [100, 300, 900],
        "best_test_acc": [0.4, 0.5, 0.6],
        "final_test_acc": [0.3, 0.45, 0.6],
        "best_alpha_m": [0.1, 0.2, 0.3],
        "final_alpha_m": [0.1, 0.15, 0.3],
        "error": [None, None, None],
    }), tmp_path / "width_sweep.csv")
    return tmp_path


# ========================================
# 축 / 순서
# ========================================

def test_axis_limits_margin():
    assert axis_limits([0.0, 10.0]) == pytest.approx((-0.5, 10.5))
    assert axis_limits([2.0, 2.0]) == pytest.approx((1.9, 2.1))
    assert axis_limits([0.0]) == (-0.5, 0.5)
    assert axis_limits([]) == (0.0, 1.0)
    assert axis_limits([None, float("nan"), 1.0, 3.0]) == pytest.approx((0.9, 3.1))


def test_ordered_keys():
    assert ordered_keys(["zeta", "test", "alpha", "unpermuted"]) == ["unpermuted", "test", "alpha", "zeta"]


# ========================================
# 차트
# ========================================

def test_line_chart_is_byte_identical(tmp_path):
    series = {"test": ([0, 1, 2], [0.1, 0.4, 0.3]), "unpermuted": ([0, 1, 2], [0.2, 0.5, 0.9])}
    first = line_chart(series, tmp_path / "a.svg", "Accuracy", "epoch", "accuracy")
    second = line_chart(series, tmp_path / "b.svg", "Accuracy", "epoch", "accuracy")
    assert first.read_bytes() == second.read_bytes()
    assert b"<svg" in first.read_bytes()


def test_line_chart_skips_empty_series(tmp_path):
    series = {"permuted": ([0, 1], [None, float("nan")]), "test": ([0, 1], [0.1, 0.2])}
    path = line_chart(series, tmp_path / "c.svg", "Accuracy", "epoch", "accuracy")
    text = path.read_text(encoding="utf-8")
    assert "test" in text
    assert "permuted" not in text

    assert line_chart({"permuted": ([0], [None])}, tmp_path / "d.svg", "Empty", "x", "y") is None
    assert not (tmp_path / "d.svg").exists()


def test_heat_grid(tmp_path):
    table = pd.DataFrame([[0.1, 0.2], [0.3, float("nan")]], index=[1, 2], columns=[0, 5])
    assert heat_grid(table, tmp_path / "grid.svg", "grid").exists()
    assert heat_grid(pd.DataFrame(), tmp_path / "empty.svg", "empty") is None


# ========================================
# 실행 디렉토리 → 차트
# ========================================

def test_emit_plots(run_dir):
    paths = ReportExportService.emit_plots(run_dir)
    names = {p.name for p in paths}
    assert {"accuracy_vs_epoch.svg", "loss_vs_epoch.svg"} <= names
    assert "alpha_m_vs_layer_epoch00005.svg" in names
    assert "d_m_vs_epoch_layer01.svg" in names
    assert {"grad_log_dep_ind_all.svg", "grad_log_dep_ind_permuted.svg", "grad_log_dep_unperm_perm.svg"} <= names
    assert {"rewind_test_acc.svg", "rewind_train_acc.svg", "rewind_test_acc_vs_epoch.svg"} <= names
    assert {"width_sweep_test_acc.svg", "width_sweep_alpha_m.svg"} <= names
    assert "width_sweep_r_m.svg" not in names
    assert all(p.parent == run_dir / "plots" for p in paths)
    assert len([n for n in names if n.startswith(("alpha_m", "r_m", "d_m", "rho_center"))]) == 16


def test_emit_plots_is_deterministic(run_dir, tmp_path):
    first = ReportExportService.emit_plots(run_dir, tmp_path / "one")
    second = ReportExportService.emit_plots(run_dir, tmp_path / "two")
    assert [p.name for p in first] == [p.name for p in second]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_emit_plots_rejects_unreadable_csv(tmp_path):
    (tmp_path / "trace.csv").write_text("", encoding="utf-8")
    with pytest.raises(StorageFormatError):
        ReportExportService.emit_plots(tmp_path)


def test_emit_plots_on_empty_directory(tmp_path):
    assert ReportExportService.emit_plots(tmp_path) == []
