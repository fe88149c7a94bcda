"""
그래디언트 분해 테스트

dep + ind = 전체 그래디언트, sweep / jacobian 일치, 마지막 레이어 직접식, 리포트 행
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.core.exceptions import ConfigError
from app.domain.graddecomp import (
    GradDecompReport,
    GradNormRow,
    decompose_loss,
    grad_parts,
    grad_parts_final_layer,
    grad_parts_layer,
    layer_jacobians,
    layer_norm_spread,
    safe_log_ratio,
    subset_grad_report,
)
from app.domain.net import CheckpointStore, NetSpec, cross_entropy, forward, init_model, loss_and_grad
from app.domain.synthdata.generator import generate_spheres, one_hot, permute_labels
from app.domain.synthdata.schemas import SphereDatasetSpec, Subset
from app.domain.synthdata.subsets import subset_inputs


@pytest.fixture
def batch(rng):
    model = init_model(NetSpec(layer_widths=[6, 5, 4, 3], seed=1))
    inputs = rng.standard_normal((9, 6))
    targets = one_hot(rng.integers(0, 3, size=9), 3)
    return model, inputs, targets


# ========================================
# 손실 / 그래디언트 분해
# ========================================

def test_loss_parts_sum_to_cross_entropy(batch):
    model, inputs, targets = batch
    l_dep, l_ind = decompose_loss(model, inputs, targets)
    assert l_dep + l_ind == pytest.approx(cross_entropy(forward(model, inputs).log_probs, targets), abs=1e-12)


@pytest.mark.parametrize("method", ["sweep", "jacobian"])
def test_parts_sum_to_total_gradient(batch, method):
    model, inputs, targets = batch
    _, grads = loss_and_grad(model, inputs, targets)
    parts = grad_parts(model, inputs, targets, method=method)
    assert [p.layer for p in parts] == [1, 2, 3]
    for part, g in zip(parts, grads.weights):
        tol = 1e-10 if part.layer == model.n_layers else 1e-8
        assert_allclose(part.total, g, atol=tol)


def test_sum_holds_for_any_centering_set(batch, rng):
    model, inputs, targets = batch
    _, grads = loss_and_grad(model, inputs, targets)
    centering = rng.standard_normal((30, 6))
    for part, g in zip(grad_parts(model, inputs, targets, centering_inputs=centering), grads.weights):
        assert_allclose(part.total, g, atol=1e-8)


def test_sweep_matches_jacobian(batch):
    model, inputs, targets = batch
    sweep = grad_parts(model, inputs, targets, method="sweep")
    jac = grad_parts(model, inputs, targets, method="jacobian")
    for a, b in zip(sweep, jac):
        assert_allclose(a.dep, b.dep, atol=1e-10)
        assert_allclose(a.ind, b.ind, atol=1e-10)


def test_final_layer_closed_form(batch):
    model, inputs, targets = batch
    direct = grad_parts_final_layer(model, inputs, targets)
    swept = grad_parts_layer(model, inputs, targets, layer=model.n_layers)
    assert direct.layer == swept.layer == 3
    assert_allclose(direct.dep, swept.dep, atol=1e-14)
    assert_allclose(direct.ind, swept.ind, atol=1e-14)


def test_final_layer_jacobian_is_identity(batch):
    model, inputs, _ = batch
    jac = layer_jacobians(model, inputs, model.n_layers)
    assert jac.shape == (9, 3, 3)
    for j in jac:
        assert_allclose(j, np.eye(3))


def test_layer_range_is_checked(batch):
    model, inputs, targets = batch
    with pytest.raises(ConfigError):
        grad_parts(model, inputs, targets, layers=[0])
    with pytest.raises(ConfigError):
        layer_jacobians(model, inputs, 4)
    with pytest.raises(ConfigError):
        grad_parts(model, inputs[:0], targets[:0])


# ========================================
# 리포트
# ========================================

def test_safe_log_ratio():
    assert safe_log_ratio(math.e, 1.0) == pytest.approx(1.0)
    assert safe_log_ratio(0.0, 1.0) is None
    assert safe_log_ratio(1.0, 1e-301) is None


def test_subset_grad_report_rows(tiny_data, tiny_net_spec):
    store = CheckpointStore(tiny_net_spec)
    store.put(init_model(tiny_net_spec), 0)
    report = subset_grad_report(store, tiny_data, epochs=[0, 7])

    assert report.missing_epochs == [7]
    assert report.skipped_subsets == []
    assert len(report.rows) == 3 * 3
    assert {r.subset for r in report.rows} == {"all", "unpermuted", "permuted"}
    assert all(r.log_dep_unperm_perm is not None for r in report.rows)
    row = report.row(0, 2, "unpermuted")
    assert row.log_dep_ind == pytest.approx(math.log(row.dep_norm / row.ind_norm))
    frame = report.to_frame()
    assert list(frame.columns) == list(GradNormRow.model_fields)
    assert report.metadata["centering"] == "train"


def test_subset_grad_report_skips_empty_subsets(tiny_spec, tiny_net_spec):
    clean = generate_spheres(tiny_spec)
    store = CheckpointStore(tiny_net_spec)
    store.put(init_model(tiny_net_spec), 0)
    report = subset_grad_report(store, clean, centering="subset")
    assert report.skipped_subsets == ["permuted"]
    assert all(r.log_dep_unperm_perm is None for r in report.rows)
    assert report.metadata["centering"] == "subset"


def test_layer_norm_spread():
    report = GradDecompReport(rows=[
        GradNormRow(epoch=1, layer=1, subset="all", dep_norm=1, ind_norm=1, total_norm=0.5),
        GradNormRow(epoch=1, layer=2, subset="all", dep_norm=1, ind_norm=1, total_norm=2.0),
        GradNormRow(epoch=1, layer=3, subset="all", dep_norm=1, ind_norm=1, total_norm=0.0),
    ])
    assert math.isnan(layer_norm_spread(report, 1, "unpermuted"))
    assert layer_norm_spread(report, 1) == float("inf")
    report.rows.pop()
    assert layer_norm_spread(report, 1) == pytest.approx(4.0)


# ========================================
# 초기화 시점 부분집합 그래디언트 크기
# ========================================

def _clean_spheres(n_classes: int, dim: int, per_class: int) -> SphereDatasetSpec:
    return SphereDatasetSpec(
        n_classes=n_classes, ambient_dim=dim, sphere_dim=3, radius=0.5,
        samples_per_class=per_class, test_per_class=10, seed=0,
    )


@pytest.mark.slow
def test_unpermuted_dep_dominates_at_init():
    """ε=0.5, 에폭 0: ‖dep^unperm‖/‖dep^perm‖ ≥ 3, ‖ind^unperm‖/‖ind^perm‖ ∈ [1/2, 2] (모든 레이어)"""
    data = permute_labels(generate_spheres(_clean_spheres(4, 16, 1000)), 0.5, seed=1)
    net = NetSpec(layer_widths=[16, 64, 64, 4], seed=0)
    store = CheckpointStore(net)
    store.put(init_model(net), 0)
    report = subset_grad_report(store, data, epochs=[0])

    for layer in (1, 2, 3):
        unperm = report.row(0, layer, "unpermuted")
        perm = report.row(0, layer, "permuted")
        assert unperm.dep_norm / perm.dep_norm >= 3.0
        assert unperm.log_dep_unperm_perm == pytest.approx(math.log(unperm.dep_norm / perm.dep_norm))
        assert 0.5 <= unperm.ind_norm / perm.ind_norm <= 2.0


@pytest.mark.slow
def test_permuted_dep_shrinks_with_dataset_size():
    """초기화 시점 ‖dep^perm‖ ∝ |D|^(-1/2): 5k / 20k / 80k 에서 log-log 기울기 −0.5 ± 0.15"""
    model = init_model(NetSpec(layer_widths=[32, 64, 64, 20], seed=0))
    sizes, mean_logs = [], []
    for per_class in (250, 1000, 4000):
        clean = generate_spheres(_clean_spheres(20, 32, per_class))
        logs = []
        for seed in (1, 2, 3):
            data = permute_labels(clean, 0.5, seed=seed)
            inputs, labels = subset_inputs(data, Subset.PERMUTED)
            parts = grad_parts_final_layer(model, inputs, one_hot(labels, 20), centering_inputs=data.inputs)
            logs.append(math.log(np.linalg.norm(parts.dep)))
        sizes.append(clean.n_train)
        mean_logs.append(np.mean(logs))

    assert sizes == [5000, 20000, 80000]
    slope = np.polyfit(np.log(sizes), mean_logs, 1)[0]
    assert -0.65 <= slope <= -0.35
