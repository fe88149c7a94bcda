"""
Report Export Service

실행 디렉토리의 CSV 리포트 → SVG 차트
CSV 읽기 → 시리즈 구성 → svg_chart 렌더링
"""
import logging
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd

from app.core.exceptions import StorageFormatError
from app.reporting.svg_chart import heat_grid, line_chart

logger = logging.getLogger(__name__)

MGM_METRICS = ("alpha_m", "r_m", "d_m", "rho_center")

# trace.csv 정확도 컬럼 → 부분집합 이름
TRACE_ACCURACY_COLUMNS = {
    "train_acc": "all",
    "unpermuted_acc": "unpermuted",
    "permuted_acc": "permuted",
    "restored_acc": "restored",
    "test_acc": "test",
}


def _read_csv(path: Path) -> Optional[pd.DataFrame]:
    if not path.exists():
        return None
    try:
        return pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise StorageFormatError(f"Could not parse report {path}: {e}") from e


def _collect(paths: List[Optional[Path]]) -> List[Path]:
    return [p for p in paths if p is not None]


class ReportExportService:
    """리포트 CSV 차트 생성 서비스"""

    @staticmethod
    def export_trace(trace: pd.DataFrame, out_dir: Path) -> List[Path]:
        """
        학습 곡선 (부분집합별 정확도, 손실)

        Args:
            trace: trace.csv 프레임
            out_dir: 출력 디렉토리

        Returns:
            생성된 SVG 경로
        """
        series = {
            subset: (trace["epoch"].tolist(), trace[column].tolist())
            for column, subset in TRACE_ACCURACY_COLUMNS.items()
            if column in trace.columns
        }
        return _collect([
            line_chart(series, out_dir / "accuracy_vs_epoch.svg", "Accuracy by subset", "epoch", "accuracy"),
            line_chart(
                {"all": (trace["epoch"].tolist(), trace["loss"].tolist())},
                out_dir / "loss_vs_epoch.svg", "Training loss", "epoch", "cross entropy",
            ),
        ])

    @staticmethod
    def export_mgm(mgm: pd.DataFrame, out_dir: Path) -> List[Path]:
        """
        MGM 차트: 에폭별 (metric vs layer), 레이어별 (metric vs epoch)

        Args:
            mgm: mgm.csv 프레임 (epoch, layer, subset, alpha_m, r_m, d_m, rho_center ...)
            out_dir: 출력 디렉토리

        Returns:
            생성된 SVG 경로
        """
        mgm = mgm.sort_values(["subset", "epoch", "layer"])
        paths: List[Optional[Path]] = []
        for metric in MGM_METRICS:
            for epoch, group in mgm.groupby("epoch", sort=True):
                series = {
                    subset: (rows["layer"].tolist(), rows[metric].tolist())
                    for subset, rows in group.groupby("subset", sort=True)
                }
                paths.append(line_chart(
                    series, out_dir / f"{metric}_vs_layer_epoch{int(epoch):05d}.svg",
                    f"{metric} vs layer (epoch {int(epoch)})", "layer", metric,
                ))
            for layer, group in mgm.groupby("layer", sort=True):
                series = {
                    subset: (rows["epoch"].tolist(), rows[metric].tolist())
                    for subset, rows in group.groupby("subset", sort=True)
                }
                paths.append(line_chart(
                    series, out_dir / f"{metric}_vs_epoch_layer{int(layer):02d}.svg",
                    f"{metric} vs epoch (layer {int(layer)})", "epoch", metric,
                ))
        return _collect(paths)

    @staticmethod
    def export_grad(grad: pd.DataFrame, out_dir: Path) -> List[Path]:
        """
        그래디언트 로그 비율 격자 (layer × epoch)

        Args:
            grad: grad_report.csv 프레임
            out_dir: 출력 디렉토리

        Returns:
            생성된 SVG 경로
        """
        paths: List[Optional[Path]] = []
        for subset, rows in grad.groupby("subset", sort=True):
            table = rows.pivot_table(index="layer", columns="epoch", values="log_dep_ind", aggfunc="first")
            paths.append(heat_grid(table, out_dir / f"grad_log_dep_ind_{subset}.svg", f"log(|dep|/|ind|) - {subset}"))
        unperm_perm = grad[grad["subset"] == "all"]
        if not unperm_perm.empty:
            table = unperm_perm.pivot_table(
                index="layer", columns="epoch", values="log_dep_unperm_perm", aggfunc="first"
            )
            paths.append(heat_grid(table, out_dir / "grad_log_dep_unperm_perm.svg", "log(|dep unperm|/|dep perm|)"))
        return _collect(paths)

    @staticmethod
    def export_rewind(rewind: pd.DataFrame, out_dir: Path) -> List[Path]:
        """리와인드 그리드 (layer × rewind epoch) 정확도 격자 + 레이어별 곡선"""
        ok = rewind[rewind["error"].isna()] if "error" in rewind.columns else rewind
        paths: List[Optional[Path]] = []
        for metric in ("test_acc", "train_acc"):
            table = ok.pivot_table(index="layer", columns="epoch", values=metric, aggfunc="first")
            paths.append(heat_grid(table, out_dir / f"rewind_{metric}.svg", f"Rewind {metric}"))
        series = {
            f"layer {int(layer)}": (rows["epoch"].tolist(), rows["test_acc"].tolist())
            for layer, rows in ok.sort_values("epoch").groupby("layer", sort=True)
        }
        paths.append(line_chart(series, out_dir / "rewind_test_acc_vs_epoch.svg", "Rewind test accuracy", "rewind epoch", "test accuracy"))
        return _collect(paths)

    @staticmethod
    def export_sweep(sweep: pd.DataFrame, out_dir: Path, kind: str) -> List[Path]:
        """
        스윕 곡선 (width: 파라미터 수 기준, epsilon: ε 기준)

        Args:
            sweep: 스윕 프레임
            out_dir: 출력 디렉토리
            kind: "width" | "epsilon"
        """
        x_column = "parameter_count" if kind == "width" else "epsilon"
        ok = sweep[sweep["error"].isna()] if "error" in sweep.columns else sweep
        ok = ok.sort_values(x_column)
        xs = ok[x_column].tolist()
        paths: List[Optional[Path]] = [
            line_chart(
                {"best": (xs, ok["best_test_acc"].tolist()), "final": (xs, ok["final_test_acc"].tolist())},
                out_dir / f"{kind}_sweep_test_acc.svg", f"{kind} sweep: test accuracy", x_column, "test accuracy",
            )
        ]
        for metric in MGM_METRICS:
            series = {
                tag: (xs, ok[f"{tag}_{metric}"].tolist())
                for tag in ("best", "final") if f"{tag}_{metric}" in ok.columns
            }
            paths.append(line_chart(
                series, out_dir / f"{kind}_sweep_{metric}.svg", f"{kind} sweep: test-manifold {metric}", x_column, metric,
            ))
        return _collect(paths)

    @staticmethod
    def emit_plots(run_dir: Union[str, Path], out_dir: Union[str, Path, None] = None) -> List[Path]:
        """
        실행 디렉토리의 모든 리포트 CSV 에 대해 차트 생성

        Args:
            run_dir: trace.csv / mgm.csv / grad_report.csv / rewind.csv / *_sweep.csv 가 있는 디렉토리
            out_dir: 출력 디렉토리 (기본값: run_dir/plots)

        Returns:
            생성된 SVG 경로 목록
        """
        run_dir = Path(run_dir)
        out_dir = run_dir / "plots" if out_dir is None else Path(out_dir)

        paths: List[Path] = []
        handlers = [
            ("trace.csv", ReportExportService.export_trace),
            ("mgm.csv", ReportExportService.export_mgm),
            ("grad_report.csv", ReportExportService.export_grad),
            ("rewind.csv", ReportExportService.export_rewind),
            ("width_sweep.csv", lambda f, o: ReportExportService.export_sweep(f, o, "width")),
            ("epsilon_sweep.csv", lambda f, o: ReportExportService.export_sweep(f, o, "epsilon")),
        ]
        for name, handler in handlers:
            frame = _read_csv(run_dir / name)
            if frame is None:
                continue
            if frame.empty:
                logger.warning("Report %s is empty, no charts", name)
                continue
            paths.extend(handler(frame, out_dir))
        logger.info("Wrote %d chart(s) to %s", len(paths), out_dir)
        return paths
