"""
피드포워드 네트워크 테스트

초기화, 순전파, 해석적 그래디언트 vs 중앙 차분, 옵티마이저, 학습 루프, 체크포인트
"""
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.core.exceptions import (
    ConfigError,
    DivergenceError,
    MissingCheckpointError,
    NonFiniteActivationError,
    StorageFormatError,
)
from app.domain.net import (
    Adam,
    CheckpointStore,
    GradientDescent,
    NetSpec,
    TrainConfig,
    accuracy_by_subset,
    cross_entropy,
    forward,
    init_model,
    loss_and_grad,
    train,
)
from app.domain.net.schemas import EpochRecord, TrainingTrace
from app.domain.net.trainer import _best_epoch
from app.domain.synthdata.generator import generate_spheres, one_hot, permute_labels
from app.domain.synthdata.schemas import SphereDatasetSpec


def _numeric_grad(model, inputs, targets, array, h=1e-6):
    grad = np.zeros_like(array)
    for idx in np.ndindex(array.shape):
        original = array[idx]
        array[idx] = original + h
        plus = cross_entropy(forward(model, inputs).log_probs, targets)
        array[idx] = original - h
        minus = cross_entropy(forward(model, inputs).log_probs, targets)
        array[idx] = original
        grad[idx] = (plus - minus) / (2 * h)
    return grad


# ========================================
# NetSpec / 초기화
# ========================================

def test_net_spec_helpers(tiny_net_spec):
    assert tiny_net_spec.n_layers == 3
    assert tiny_net_spec.parameter_count() == 16 * 12 + 12 * 8 + 8 * 4
    assert tiny_net_spec.scaled(0.5).layer_widths == [16, 6, 4, 4]
    assert tiny_net_spec.scaled(0.01).layer_widths == [16, 1, 1, 4]
    assert tiny_net_spec.spec_hash() == NetSpec(layer_widths=[16, 12, 8, 4], seed=0).spec_hash()
    assert tiny_net_spec.spec_hash() != tiny_net_spec.scaled(2).spec_hash()


def test_glorot_normal_std():
    model = init_model(NetSpec(layer_widths=[200, 300, 100], seed=0))
    assert model.weights[0].shape == (300, 200)
    assert model.weights[0].std() == pytest.approx(np.sqrt(2.0 / 500), rel=0.02)
    assert model.weights[1].std() == pytest.approx(np.sqrt(2.0 / 400), rel=0.03)
    assert model.biases is None


def test_gain_scales_init():
    base = init_model(NetSpec(layer_widths=[10, 10, 4], seed=3))
    scaled = init_model(NetSpec(layer_widths=[10, 10, 4], seed=3, gain=2.0))
    assert_allclose(scaled.weights[0], 2.0 * base.weights[0])


# ========================================
# 순전파 / 역전파
# ========================================

def test_forward_shapes(tiny_net_spec, rng):
    model = init_model(tiny_net_spec)
    inputs = rng.standard_normal((7, 16))
    fp = forward(model, inputs)
    assert [p.shape for p in fp.post] == [(7, 16), (7, 12), (7, 8), (7, 4)]
    assert_array_equal(fp.post[0], inputs)
    assert np.all(fp.post[1] >= 0)
    assert_allclose(fp.probs.sum(axis=1), 1.0)
    assert_allclose(np.exp(fp.log_probs), fp.probs, atol=1e-12)


def test_forward_errors(tiny_net_spec, rng):
    model = init_model(tiny_net_spec)
    with pytest.raises(ConfigError):
        forward(model, rng.standard_normal((3, 15)))
    model.weights[0][0, 0] = np.inf
    with pytest.raises(NonFiniteActivationError) as info:
        forward(model, np.ones((2, 16)))
    assert info.value.layer == 1


@pytest.mark.parametrize("use_bias", [False, True])
def test_gradient_matches_central_differences(rng, use_bias):
    model = init_model(NetSpec(layer_widths=[5, 4, 3, 3], seed=2, use_bias=use_bias))
    if use_bias:
        for b in model.biases:
            b += 0.1
    inputs = rng.standard_normal((6, 5))
    targets = one_hot(np.array([0, 1, 2, 0, 1, 2]), 3)

    _, grads = loss_and_grad(model, inputs, targets)
    for w, g in zip(model.weights, grads.weights):
        numeric = _numeric_grad(model, inputs, targets, w)
        assert np.max(np.abs(numeric - g)) <= 1e-4 * max(1.0, np.max(np.abs(g)))
    if use_bias:
        for b, g in zip(model.biases, grads.biases):
            numeric = _numeric_grad(model, inputs, targets, b)
            assert np.max(np.abs(numeric - g)) <= 1e-4 * max(1.0, np.max(np.abs(g)))


def test_loss_and_grad_rejects_empty_batch(tiny_net_spec):
    with pytest.raises(ConfigError):
        loss_and_grad(init_model(tiny_net_spec), np.zeros((0, 16)), np.zeros((0, 4)))


# ========================================
# 옵티마이저
# ========================================

def test_gradient_descent_step_reduces_loss(tiny_net_spec, rng):
    model = init_model(tiny_net_spec)
    inputs = rng.standard_normal((20, 16))
    targets = one_hot(rng.integers(0, 4, size=20), 4)
    before, grads = loss_and_grad(model, inputs, targets)
    GradientDescent(1e-3).step(model, grads)
    after, _ = loss_and_grad(model, inputs, targets)
    assert after < before


def test_adam_first_step_moves_by_learning_rate(tiny_net_spec, rng):
    model = init_model(tiny_net_spec)
    start = [w.copy() for w in model.weights]
    inputs = rng.standard_normal((20, 16))
    targets = one_hot(rng.integers(0, 4, size=20), 4)
    _, grads = loss_and_grad(model, inputs, targets)
    Adam(1e-3).step(model, grads)
    for w0, w1, g in zip(start, model.weights, grads.weights):
        big = np.abs(g) > 1e-4
        assert_allclose((w1 - w0)[big], -1e-3 * np.sign(g[big]), rtol=1e-3)


# ========================================
# 학습 루프
# ========================================

def test_train_records_every_epoch(tiny_data, tiny_net_spec):
    model = init_model(tiny_net_spec)
    store = CheckpointStore(tiny_net_spec)
    trace = train(model, tiny_data, TrainConfig(learning_rate=1e-2, batch_size=16, max_epochs=5), store)

    epochs = [r.epoch for r in trace.records]
    assert epochs == list(range(trace.final_epoch + 1))
    assert store.epochs == trace.checkpoint_epochs
    assert 0 in store and trace.final_epoch in store
    assert trace.records[-1].loss < trace.records[0].loss
    assert trace.records[0].permuted_acc is not None
    assert trace.to_frame().shape[0] == len(trace.records)


def test_train_checkpoint_stride(tiny_data, tiny_net_spec):
    store = CheckpointStore(tiny_net_spec)
    cfg = TrainConfig(learning_rate=1e-4, batch_size=16, max_epochs=5, checkpoint_stride=2, target_accuracy=1.0)
    trace = train(init_model(tiny_net_spec), tiny_data, cfg, store)
    assert store.epochs == [0, 2, 4, 5]
    assert trace.stopped_reason == "max_epochs"


def test_train_divergence(tiny_data, tiny_net_spec):
    with pytest.raises(DivergenceError) as info:
        train(init_model(tiny_net_spec), tiny_data, TrainConfig(max_epochs=2, divergence_loss=1e-6))
    assert info.value.epoch == 1


def test_train_rejects_mismatched_model(tiny_data):
    with pytest.raises(ConfigError):
        train(init_model(NetSpec(layer_widths=[10, 4], seed=0)), tiny_data, TrainConfig(max_epochs=1))


def test_best_epoch_prefers_earliest_tie():
    trace = TrainingTrace(records=[
        EpochRecord(epoch=0, loss=2.0, train_acc=0.2, test_acc=0.3),
        EpochRecord(epoch=1, loss=1.0, train_acc=0.5, test_acc=0.7),
        EpochRecord(epoch=2, loss=0.5, train_acc=0.8, test_acc=0.7),
        EpochRecord(epoch=3, loss=0.2, train_acc=0.9, test_acc=0.6),
    ])
    assert _best_epoch(trace) == 1
    assert trace.record(2).loss == 0.5
    with pytest.raises(KeyError):
        trace.record(9)


def _first_epoch_above(trace, field: str, threshold: float) -> float:
    for record in trace.records:
        if getattr(record, field) > threshold:
            return record.epoch
    return float("inf")


@pytest.mark.slow
def test_restored_accuracy_rises_before_permuted():
    """ε=0.5: restored 정확도가 permuted 정확도보다 먼저 2×chance 를 넘는다"""
    spec = SphereDatasetSpec(
        n_classes=4, ambient_dim=16, sphere_dim=3, radius=0.5, samples_per_class=100, test_per_class=25, seed=0,
    )
    data = permute_labels(generate_spheres(spec), 0.5, seed=1)
    net = NetSpec(layer_widths=[16, 64, 64, 4], seed=0)
    trace = train(init_model(net), data, TrainConfig(learning_rate=1e-2, batch_size=32, max_epochs=40, seed=0))

    chance = 1.0 / spec.n_classes
    restored = _first_epoch_above(trace, "restored_acc", 2 * chance)
    permuted = _first_epoch_above(trace, "permuted_acc", 2 * chance)
    assert restored < float("inf")
    assert restored < permuted


def test_accuracy_by_subset_omits_empty(tiny_spec, tiny_net_spec):
    clean = generate_spheres(tiny_spec)
    acc = accuracy_by_subset(init_model(tiny_net_spec), clean)
    assert set(acc.omitted) == {"permuted", "restored"}
    assert acc.get("all") == acc.get("unpermuted")
    assert acc.get("permuted") is None


# ========================================
# 체크포인트
# ========================================

def test_snapshots_are_read_only(tiny_net_spec):
    store = CheckpointStore(tiny_net_spec)
    model = init_model(tiny_net_spec)
    store.put(model, 0)
    model.weights[0][0, 0] += 1.0
    snap = store.snapshot(0)
    assert snap.weights[0][0, 0] != model.weights[0][0, 0]
    with pytest.raises(ValueError):
        snap.weights[0][0, 0] = 5.0
    writable = store.get(0)
    writable.weights[0][0, 0] = 5.0
    assert store.snapshot(0).weights[0][0, 0] != 5.0


def test_snapshot_overwrite_and_missing(tiny_net_spec):
    store = CheckpointStore(tiny_net_spec)
    store.put(init_model(tiny_net_spec), 0)
    with pytest.raises(ConfigError):
        store.put(init_model(tiny_net_spec), 0)
    with pytest.raises(MissingCheckpointError):
        store.snapshot(3)


def test_checkpoint_store_persists(tiny_net_spec, tmp_path):
    store = CheckpointStore(tiny_net_spec, seeds={"init": 0}, directory=tmp_path / "ckpt")
    model = init_model(tiny_net_spec)
    store.put(model, 0)
    model.weights[1] *= 2.0
    model.epoch = 3
    store.put(model)

    loaded = CheckpointStore.load(tmp_path / "ckpt")
    assert loaded.epochs == [0, 3]
    assert loaded.seeds == {"init": 0}
    assert_array_equal(loaded.snapshot(3).weights[1], store.snapshot(3).weights[1])


def test_checkpoint_load_validates_manifest(tiny_net_spec, tmp_path):
    with pytest.raises(StorageFormatError):
        CheckpointStore.load(tmp_path / "nothing")

    store = CheckpointStore(tiny_net_spec, directory=tmp_path / "ckpt")
    store.put(init_model(tiny_net_spec), 0)
    manifest_path = tmp_path / "ckpt" / "manifest.json"
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    manifest["spec_hash"] = "0" * 64
    manifest_path.write_text(json.dumps(manifest), encoding="utf-8")
    with pytest.raises(StorageFormatError):
        CheckpointStore.load(tmp_path / "ckpt")
