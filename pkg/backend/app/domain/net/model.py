"""
Feedforward Model

Glorot 초기화, 순전파(log-softmax), cross entropy 역전파
"""
import logging
from typing import Optional

import numpy as np
from scipy.special import logsumexp, softmax

from app.core.exceptions import ConfigError, NonFiniteActivationError
from app.domain.net.schemas import FeedforwardModel, ForwardPass, Gradients, NetSpec

logger = logging.getLogger(__name__)


def init_model(spec: NetSpec) -> FeedforwardModel:
    """
    Glorot normal 초기화: std = gain · √(2 / (fan_in + fan_out))

    Args:
        spec: NetSpec

    Returns:
        epoch=0 인 FeedforwardModel
    """
    rng = np.random.default_rng(spec.seed)
    widths = spec.layer_widths
    weights = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        std = spec.gain * np.sqrt(2.0 / (fan_in + fan_out))
        weights.append(rng.standard_normal((fan_out, fan_in)) * std)
    biases = [np.zeros(w) for w in widths[1:]] if spec.use_bias else None
    return FeedforwardModel(weights=weights, biases=biases, epoch=0)


def forward(model: FeedforwardModel, inputs: np.ndarray) -> ForwardPass:
    """
    순전파

    Args:
        model: FeedforwardModel
        inputs: (B, D) 입력

    Returns:
        ForwardPass (모든 레이어 활성값 + log P_M)

    Raises:
        ConfigError: 입력 폭 불일치
        NonFiniteActivationError: non-finite 활성값 (레이어 인덱스 포함)
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != model.weights[0].shape[1]:
        raise ConfigError(
            f"Input width {inputs.shape[-1]} does not match model input {model.weights[0].shape[1]}"
        )

    pre, post = [], [inputs]
    h = inputs
    last = model.n_layers - 1
    for l, w in enumerate(model.weights):
        z = h @ w.T
        if model.biases is not None:
            z = z + model.biases[l]
        if not np.all(np.isfinite(z)):
            raise NonFiniteActivationError(l + 1)
        pre.append(z)
        h = z if l == last else np.maximum(z, 0.0)
        post.append(h)

    log_probs = h - logsumexp(h, axis=1, keepdims=True)
    return ForwardPass(pre=pre, post=post, log_probs=log_probs, probs=softmax(h, axis=1))


def cross_entropy(log_probs: np.ndarray, targets: np.ndarray) -> float:
    """배치 평균 −Σ_c P_L log P_M"""
    return float(-np.sum(targets * log_probs) / log_probs.shape[0])


def backward(model: FeedforwardModel, fp: ForwardPass, delta: np.ndarray) -> Gradients:
    """
    logits 에 대한 그래디언트 delta 를 모든 레이어로 역전파

    Args:
        model: FeedforwardModel
        fp: 같은 배치의 ForwardPass
        delta: (B, P) ∂L/∂logits

    Returns:
        Gradients
    """
    n_layers = model.n_layers
    grads_w = [None] * n_layers
    grads_b = [None] * n_layers if model.biases is not None else None
    for l in range(n_layers - 1, -1, -1):
        grads_w[l] = delta.T @ fp.post[l]
        if grads_b is not None:
            grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l]) * (fp.pre[l - 1] > 0.0)
    return Gradients(weights=grads_w, biases=grads_b)


def loss_and_grad(model: FeedforwardModel, inputs: np.ndarray, targets: np.ndarray, fp: Optional[ForwardPass] = None):
    """
    cross entropy 와 해석적 그래디언트

    ∂L/∂logits = (P_M · Σ_c P_L − P_L) / B

    Args:
        model: FeedforwardModel
        inputs: (B, D) 배치
        targets: (B, P) 라벨 분포 P_L
        fp: 이미 계산한 순전파 (선택)

    Returns:
        (loss, Gradients)
    """
    if inputs.shape[0] == 0:
        raise ConfigError("loss_and_grad needs a non-empty batch")
    fp = fp or forward(model, inputs)
    batch = inputs.shape[0]
    delta = (fp.probs * targets.sum(axis=1, keepdims=True) - targets) / batch
    return cross_entropy(fp.log_probs, targets), backward(model, fp, delta)


def predict(model: FeedforwardModel, inputs: np.ndarray) -> np.ndarray:
    """argmax 예측 클래스"""
    return np.argmax(forward(model, inputs).logits, axis=1)


def evaluate_loss(model: FeedforwardModel, inputs: np.ndarray, labels: np.ndarray) -> float:
    """정수 라벨에 대한 평균 cross entropy"""
    fp = forward(model, inputs)
    return float(-fp.log_probs[np.arange(labels.size), labels].mean())


def layer_activations(model: FeedforwardModel, inputs: np.ndarray):
    """분석 대상 레이어 활성값 (0 = 입력, 1..L−1 = 은닉 ReLU, L = logits)"""
    return forward(model, inputs).post
