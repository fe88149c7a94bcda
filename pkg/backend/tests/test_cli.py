"""
CLI 테스트 (typer CliRunner)

종료 코드: 0 성공, 2 설정 오류, 4 저장소 오류
"""
import json

import numpy as np
import pytest
from typer.testing import CliRunner

from app.infrastructure.storage.activation_dump import ActivationDump, write_activation_dump
from app.main import app

runner = CliRunner()


@pytest.fixture
def config_file(tiny_cfg, tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(tiny_cfg.model_dump_json(), encoding="utf-8")
    return path


def test_missing_config_exits_2(tmp_path):
    result = runner.invoke(app, ["gen-data", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")])
    assert result.exit_code == 2


def test_invalid_config_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"epsilon": 2.0}), encoding="utf-8")
    result = runner.invoke(app, ["train", "--config", str(path), "--out", str(tmp_path / "o")])
    assert result.exit_code == 2


def test_missing_run_exits_4(tmp_path):
    result = runner.invoke(app, ["analyze", "--run", str(tmp_path / "missing")])
    assert result.exit_code == 4


def test_bad_centering_exits_2(tmp_path):
    result = runner.invoke(app, ["grad-report", "--run", str(tmp_path), "--centering", "batch"])
    assert result.exit_code == 2


def test_gen_data_refuses_overwrite(config_file, tmp_path):
    out = tmp_path / "data"
    first = runner.invoke(app, ["gen-data", "--config", str(config_file), "--out", str(out), "--csv"])
    assert first.exit_code == 0, first.output
    assert (out / "dataset.mpd1").exists()
    assert (out / "dataset.csv").exists()

    again = runner.invoke(app, ["gen-data", "--config", str(config_file), "--out", str(out)])
    assert again.exit_code == 4

    forced = runner.invoke(app, ["gen-data", "--config", str(config_file), "--out", str(out), "--force"])
    assert forced.exit_code == 0


def test_capacity_on_dump(tmp_path):
    rng = np.random.default_rng(0)
    labels = np.repeat(np.arange(4), 6)
    dump = ActivationDump(points=rng.standard_normal((24, 30)), labels=labels, provenance="cli-test")
    write_activation_dump(dump, tmp_path / "acts.mfp1")

    out = tmp_path / "cap"
    result = runner.invoke(app, ["capacity", "--dump", str(tmp_path / "acts.mfp1"), "--samples", "20", "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "capacity.json").read_text(encoding="utf-8"))
    assert report["alpha_m"] > 0
    assert report["metadata"]["class_ids"] == [0, 1, 2, 3]


def test_capacity_on_missing_dump_exits_4(tmp_path):
    result = runner.invoke(app, ["capacity", "--dump", str(tmp_path / "none.mfp1"), "--out", str(tmp_path / "cap")])
    assert result.exit_code == 4


def test_train_then_follow_up_commands(config_file, tmp_path):
    run = tmp_path / "run"
    trained = runner.invoke(app, ["train", "--config", str(config_file), "--out", str(run)])
    assert trained.exit_code == 0, trained.output
    assert (run / "checkpoints" / "manifest.json").exists()

    analyzed = runner.invoke(app, ["analyze", "--run", str(run), "--epoch", "0"])
    assert analyzed.exit_code == 0, analyzed.output
    assert (run / "mgm.csv").exists()

    grads = runner.invoke(app, ["grad-report", "--run", str(run), "--epoch", "0"])
    assert grads.exit_code == 0, grads.output
    assert (run / "grad_report.csv").exists()

    rewound = runner.invoke(app, ["rewind-sweep", "--run", str(run), "--layer", "1", "--epoch", "0"])
    assert rewound.exit_code == 0, rewound.output
    assert (run / "rewind.csv").exists()

    plotted = runner.invoke(app, ["plot", "--run", str(run)])
    assert plotted.exit_code == 0, plotted.output
    assert (run / "plots" / "accuracy_vs_epoch.svg").exists()

    refused = runner.invoke(app, ["analyze", "--run", str(run), "--epoch", "0"])
    assert refused.exit_code == 4
