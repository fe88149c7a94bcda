"""
Manifold Memorization Lab CLI

typer 기반 명령행 진입점 (`python -m app.main ...`)
"""
import json
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, List, Optional

import pandas as pd
import typer
from dotenv import load_dotenv
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

# .env 파일 로드 (backend 폴더 기준)
BACKEND_DIR = Path(__file__).resolve().parent.parent
env_file = BACKEND_DIR / ".env"
if env_file.exists():
    load_dotenv(dotenv_path=env_file)

from app.core.config import settings  # noqa: E402
from app.core.exceptions import ConfigError, StorageFormatError, exit_code_for  # noqa: E402
from app.core.logging import setup_logging  # noqa: E402
from app.domain.experiments import (  # noqa: E402
    DEFAULT_WIDTH_FACTORS,
    ExperimentConfig,
    analysis_epochs,
    epsilon_sweep,
    ingest_activation_dump,
    layer_reports,
    prepare_data,
    rewind_sweep,
    run_memorization_experiment,
    width_sweep,
)
from app.domain.empirical import empirical_capacity  # noqa: E402
from app.domain.geometry import GeometryConfig, analyze  # noqa: E402
from app.domain.graddecomp import layer_norm_spread, subset_grad_report  # noqa: E402
from app.domain.net import CheckpointStore, TrainingTrace, init_model, train  # noqa: E402
from app.infrastructure.storage.dataset_store import export_dataset_csv, save_dataset  # noqa: E402
from app.infrastructure.storage.run_dir import RunDirectory  # noqa: E402
from app.reporting import ReportExportService  # noqa: E402

app = typer.Typer(
    name="mmlab",
    help="Manifold geometry probe and label-noise memorization laboratory",
    add_completion=False,
    no_args_is_help=True,
)
console = Console()

# 공통 옵션
ConfigOpt = Annotated[Optional[Path], typer.Option("--config", "-c", help="ExperimentConfig JSON 파일")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="모든 시드를 이 값 기준으로 재설정")]
ThreadsOpt = Annotated[Optional[int], typer.Option("--threads", min=1, help="분석 스레드 수")]
OutOpt = Annotated[Optional[Path], typer.Option("--out", "-o", help="실행 출력 디렉토리")]
ForceOpt = Annotated[bool, typer.Option("--force", help="기존 산출물 덮어쓰기 허용")]
RunOpt = Annotated[Path, typer.Option("--run", help="train/run 으로 만든 실행 디렉토리")]


@contextmanager
def cli_errors():
    """예외 → rich 오류 메시지 + 종료 코드"""
    try:
        yield
    except ValidationError as e:
        console.print(f"[bold red]Config error:[/bold red] {e}")
        raise typer.Exit(2)
    except (ValueError, ArithmeticError, OSError, KeyError) as e:
        console.print(f"[bold red]Error ({type(e).__name__}):[/bold red] {e}")
        raise typer.Exit(exit_code_for(e))


def load_config(config: Optional[Path], seed: Optional[int], threads: Optional[int]) -> ExperimentConfig:
    """설정 파일 (없으면 데스크 기본값) + 시드/스레드 덮어쓰기"""
    cfg = ExperimentConfig.from_file(config) if config else ExperimentConfig.desk_default(settings.DEFAULT_SEED)
    if seed is not None:
        cfg = cfg.with_seed(seed)
    threads = threads or settings.NUM_THREADS
    payload = cfg.model_dump(mode="json")
    payload["analysis"]["geometry"]["threads"] = threads
    return ExperimentConfig.model_validate(payload)


def open_run_dir(out: Optional[Path], cfg: ExperimentConfig, force: bool) -> RunDirectory:
    return RunDirectory(out if out is not None else Path(cfg.output_dir), force=force)


def load_run(run: Path, threads: Optional[int] = None):
    """
    실행 디렉토리 복원: 매니페스트 설정, 체크포인트, 학습 트레이스

    Raises:
        StorageFormatError: 매니페스트/트레이스 누락
    """
    manifest_path = run / "manifest.json"
    trace_path = run / "trace.json"
    for required in (manifest_path, trace_path):
        if not required.exists():
            raise StorageFormatError(f"{required} not found; run `train` or `run` first")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    cfg = ExperimentConfig.model_validate(manifest["config"])
    if threads:
        payload = cfg.model_dump(mode="json")
        payload["analysis"]["geometry"]["threads"] = threads
        cfg = ExperimentConfig.model_validate(payload)
    store = CheckpointStore.load(run / "checkpoints")
    trace = TrainingTrace.model_validate_json(trace_path.read_text(encoding="utf-8"))
    return cfg, store, trace


def print_mgm_table(frame, title: str) -> None:
    table = Table(title=title)
    for column in ("epoch", "layer", "subset", "alpha_m", "r_m", "d_m", "rho_center"):
        table.add_column(column)
    for _, row in frame.iterrows():
        table.add_row(
            str(row["epoch"]), str(row["layer"]), str(row["subset"]),
            *(f"{row[c]:.4f}" for c in ("alpha_m", "r_m", "d_m", "rho_center")),
        )
    console.print(table)


@app.callback()
def main(
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="로그 레벨")] = None,
    log_file: Annotated[Optional[str], typer.Option("--log-file", help="로그 파일 경로")] = None,
):
    """로깅 초기화"""
    setup_logging(log_level, log_file)


@app.command("gen-data")
def gen_data(
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    out: OutOpt = None,
    force: ForceOpt = False,
    csv: Annotated[bool, typer.Option("--csv", help="CSV 사본도 저장")] = False,
):
    """합성 구(sphere) 데이터셋 생성 + 라벨 치환 → MPD1"""
    with cli_errors():
        cfg = load_config(config, seed, None)
        run_dir = open_run_dir(out, cfg, force)
        run_dir.write_manifest(cfg.config_json(), cfg.seeds())
        data = prepare_data(cfg)
        path = save_dataset(data, run_dir.path("dataset.mpd1"), force=True)
        if csv:
            export_dataset_csv(data, run_dir.path("dataset.csv"), force=True)
        console.print(
            f"[green]Dataset written:[/green] {path} "
            f"(train {data.n_train}, test {data.n_test}, permuted {data.n_permuted})"
        )


@app.command("train")
def train_cmd(
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    out: OutOpt = None,
    force: ForceOpt = False,
):
    """네트워크 학습 + 에폭별 체크포인트 (MPC1)"""
    with cli_errors():
        cfg = load_config(config, seed, None)
        run_dir = open_run_dir(out, cfg, force)
        run_dir.write_manifest(cfg.config_json(), cfg.seeds())
        try:
            data = prepare_data(cfg)
            store = CheckpointStore(cfg.net, seeds=cfg.seeds(), directory=run_dir.subdir("checkpoints"))
            trace = train(init_model(cfg.net), data, cfg.train, store)
        except (ValueError, ArithmeticError) as e:
            run_dir.mark_failed("train", e)
            raise
        run_dir.write_csv("trace.csv", trace.to_frame())
        run_dir.write_json("trace.json", trace.model_dump(mode="json"))
        final = trace.record(trace.final_epoch)
        console.print(
            f"[green]Training done[/green] at epoch {trace.final_epoch} ({trace.stopped_reason}); "
            f"best epoch {trace.best_epoch}, final train/test acc {final.train_acc:.3f}/{final.test_acc:.3f}"
        )


@app.command("analyze")
def analyze_cmd(
    run: RunOpt,
    epochs: Annotated[Optional[List[int]], typer.Option("--epoch", help="분석 에폭 (반복 가능)")] = None,
    threads: ThreadsOpt = None,
    force: ForceOpt = False,
):
    """저장된 체크포인트에 대해 레이어 × 부분집합 MGM 분석"""
    with cli_errors():
        cfg, store, trace = load_run(run, threads)
        run_dir = RunDirectory(run, force=force)
        schedule = cfg.analysis
        if epochs:
            chosen = sorted(set(epochs))
        elif schedule.epochs is not None:
            chosen = sorted(set(schedule.epochs) | {trace.best_epoch, trace.final_epoch})
        else:
            chosen = analysis_epochs(trace.best_epoch, trace.final_epoch, store.epochs, schedule.n_log_epochs)
        data = prepare_data(cfg)
        reports, skipped = [], []
        for epoch in chosen:
            reports.extend(layer_reports(store.snapshot(epoch), data, schedule, epoch, schedule.layers, skipped=skipped))
        frame = pd.DataFrame([r.to_row() for r in reports])
        run_dir.write_csv("mgm.csv", frame)
        run_dir.write_json("mgm.json", {"reports": [r.model_dump(mode="json") for r in reports], "skipped": skipped})
        if not frame.empty:
            print_mgm_table(frame[frame["epoch"].isin({trace.best_epoch, trace.final_epoch})], "MGM (best / final)")


@app.command("grad-report")
def grad_report_cmd(
    run: RunOpt,
    epochs: Annotated[Optional[List[int]], typer.Option("--epoch", help="에폭 (반복 가능)")] = None,
    centering: Annotated[str, typer.Option("--centering", help="평균 그래디언트 기준: train | subset")] = "train",
    force: ForceOpt = False,
):
    """부분집합별 label-dependent / independent 그래디언트 노름"""
    with cli_errors():
        if centering not in ("train", "subset"):
            raise ConfigError(f"--centering must be 'train' or 'subset', got {centering!r}")
        cfg, store, trace = load_run(run)
        run_dir = RunDirectory(run, force=force)
        data = prepare_data(cfg)
        report = subset_grad_report(store, data, epochs or None, centering=centering)
        run_dir.write_csv("grad_report.csv", report.to_frame())
        run_dir.write_json("grad_report.json", report.model_dump(mode="json"))
        for epoch in sorted({r.epoch for r in report.rows}):
            spread = layer_norm_spread(report, epoch)
            console.print(f"epoch {epoch}: layer gradient-norm spread {spread:.2f}")
        if report.missing_epochs:
            console.print(f"[yellow]Missing epochs:[/yellow] {report.missing_epochs}")


@app.command("rewind-sweep")
def rewind_sweep_cmd(
    run: RunOpt,
    layers: Annotated[Optional[List[int]], typer.Option("--layer", help="레이어 (1-based, 반복 가능)")] = None,
    epochs: Annotated[Optional[List[int]], typer.Option("--epoch", help="리와인드 에폭 (반복 가능)")] = None,
    force: ForceOpt = False,
):
    """레이어별 가중치를 과거 에폭으로 되돌려 정확도 측정"""
    with cli_errors():
        cfg, store, trace = load_run(run)
        run_dir = RunDirectory(run, force=force)
        data = prepare_data(cfg)
        result = rewind_sweep(
            store, data, layers or None, epochs or None,
            final_epoch=trace.final_epoch, best_epoch=trace.best_epoch,
        )
        run_dir.write_csv("rewind.csv", result.to_frame())
        run_dir.write_json("rewind.json", result.model_dump(mode="json"))
        console.print(f"[green]Rewind grid:[/green] {len(result.cells)} cells; baseline final {result.baseline_final}")


@app.command("width-sweep")
def width_sweep_cmd(
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    threads: ThreadsOpt = None,
    out: OutOpt = None,
    force: ForceOpt = False,
    factors: Annotated[Optional[List[float]], typer.Option("--factor", help="폭 배율 (반복 가능, ≥3개)")] = None,
    epsilon: Annotated[float, typer.Option("--epsilon", min=0.0, max=1.0, help="라벨 노이즈")] = 0.1,
):
    """은닉 폭 스윕 (double descent)"""
    with cli_errors():
        cfg = load_config(config, seed, threads)
        run_dir = open_run_dir(out, cfg, force)
        factors = list(factors) if factors else list(DEFAULT_WIDTH_FACTORS)
        run_dir.write_manifest(cfg.config_json(), cfg.seeds(), {"width_factors": factors, "epsilon": epsilon})
        result = width_sweep(cfg, factors, epsilon=epsilon)
        run_dir.write_csv("width_sweep.csv", result.to_frame())
        run_dir.write_json("width_sweep.json", result.model_dump(mode="json"))
        console.print(f"[green]Width sweep diagnostics:[/green] {result.diagnostics}")


@app.command("epsilon-sweep")
def epsilon_sweep_cmd(
    epsilons: Annotated[List[float], typer.Option("--eps", help="라벨 노이즈 비율 (반복 가능)")],
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    threads: ThreadsOpt = None,
    out: OutOpt = None,
    force: ForceOpt = False,
):
    """라벨 노이즈 비율 스윕"""
    with cli_errors():
        cfg = load_config(config, seed, threads)
        run_dir = open_run_dir(out, cfg, force)
        run_dir.write_manifest(cfg.config_json(), cfg.seeds(), {"epsilons": list(epsilons)})
        result = epsilon_sweep(cfg, epsilons)
        run_dir.write_csv("epsilon_sweep.csv", result.to_frame())
        run_dir.write_json("epsilon_sweep.json", result.model_dump(mode="json"))
        console.print(f"[green]Epsilon sweep diagnostics:[/green] {result.diagnostics}")


@app.command("capacity")
def capacity_cmd(
    dump: Annotated[Path, typer.Option("--dump", help="MFP1 덤프 또는 CSV")],
    seed: SeedOpt = None,
    threads: ThreadsOpt = None,
    out: OutOpt = None,
    force: ForceOpt = False,
    samples: Annotated[int, typer.Option("--samples", min=1, help="가우시안 샘플 수")] = settings.GAUSS_SAMPLES,
    projection: Annotated[str, typer.Option("--projection", help="others | others_raw | mean | none")] = "others",
    empirical: Annotated[bool, typer.Option("--empirical", help="LP 기반 경험적 용량도 계산")] = False,
):
    """외부 활성값 덤프에 대한 단독 MFTMA 분석"""
    with cli_errors():
        manifold_set = ingest_activation_dump(dump)
        seed = settings.DEFAULT_SEED if seed is None else seed
        threads = threads or settings.NUM_THREADS
        geometry = GeometryConfig(n_samples=samples, seed=seed, projection=projection, threads=threads)
        report = analyze(manifold_set, geometry)
        if empirical:
            emp = empirical_capacity(manifold_set, settings.DICHOTOMY_TRIALS, seed, threads)
            report = report.model_copy(update={"alpha_empirical": emp.alpha_empirical})

        run_dir = RunDirectory(out if out is not None else settings.output_path, force=force)
        run_dir.write_manifest(
            geometry.model_dump(mode="json"), {"geometry": seed}, {"dump": str(dump), "empirical": empirical}
        )
        run_dir.write_json("capacity.json", report.model_dump(mode="json"))
        console.print(
            f"α_M={report.alpha_m:.4f}  R_M={report.r_m:.4f}  D_M={report.d_m:.4f}  ρ_center={report.rho_center:.4f}"
            + (f"  α_emp={report.alpha_empirical:.4f}" if report.alpha_empirical is not None else "")
        )


@app.command("plot")
def plot_cmd(
    run: RunOpt,
    out: OutOpt = None,
):
    """실행 디렉토리의 CSV 리포트 → SVG 차트"""
    with cli_errors():
        paths = ReportExportService.emit_plots(run, out)
        console.print(f"[green]{len(paths)} chart(s) written[/green]")


@app.command("run")
def run_cmd(
    config: ConfigOpt = None,
    seed: SeedOpt = None,
    threads: ThreadsOpt = None,
    out: OutOpt = None,
    force: ForceOpt = False,
    rewind: Annotated[bool, typer.Option("--rewind/--no-rewind", help="리와인드 스윕 포함")] = True,
    plots: Annotated[bool, typer.Option("--plots/--no-plots", help="SVG 차트 생성")] = True,
):
    """전체 파이프라인: 데이터 → 학습 → MGM → 그래디언트 → 리와인드 → 차트"""
    with cli_errors():
        cfg = load_config(config, seed, threads)
        run_dir = open_run_dir(out, cfg, force)
        bundle = run_memorization_experiment(cfg, run_dir)
        if rewind:
            try:
                result = rewind_sweep(
                    bundle.store, bundle.data,
                    final_epoch=bundle.trace.final_epoch, best_epoch=bundle.trace.best_epoch,
                )
            except (ValueError, ArithmeticError, KeyError) as e:
                run_dir.mark_failed("rewind", e)
                raise
            run_dir.write_csv("rewind.csv", result.to_frame())
            run_dir.write_json("rewind.json", result.model_dump(mode="json"))
        if plots:
            ReportExportService.emit_plots(run_dir.root)
        frame = bundle.mgm_frame()
        if not frame.empty:
            best, final = bundle.trace.best_epoch, bundle.trace.final_epoch
            print_mgm_table(frame[frame["epoch"].isin({best, final})], "MGM (best / final)")
        console.print(f"[green]Run complete:[/green] {run_dir.root}")


if __name__ == "__main__":
    app()
