"""
Label-dependent / Label-independent Decomposition

L = −⟨Σ_c P_L N_c⟩ + ⟨Σ_c P_L · log Z⟩ = L_dep + L_ind

레이어 l 그래디언트:
  ∂L_dep/∂W^l = −⟨(Jᵀ P_L) ⊗ φ^{l−1}⟩ + ḡ^l
  ∂L_ind/∂W^l = +⟨(Jᵀ P_M) ⊗ φ^{l−1}⟩ − ḡ^l
  ḡ^l_{αβ} = ⟨(1/P) Σ_c J_{cα} φ^{l−1}_β⟩ (centering 집합 평균)

ḡ 를 양쪽에 반대 부호로 더하므로 dep + ind 는 전체 그래디언트와 정확히 같다.
마지막 레이어에서는 J = I 이므로 ḡ = φ̄/P.
"""
from typing import List, Literal, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from app.core.exceptions import ConfigError
from app.domain.graddecomp.schemas import GradParts
from app.domain.net.model import backward, forward
from app.domain.net.schemas import FeedforwardModel, ForwardPass

Method = Literal["sweep", "jacobian"]


def decompose_loss(model: FeedforwardModel, inputs: np.ndarray, targets: np.ndarray) -> Tuple[float, float]:
    """
    (L_dep, L_ind) 계산

    Args:
        model: FeedforwardModel
        inputs: (B, D) 배치
        targets: (B, P) 라벨 분포 P_L

    Returns:
        (L_dep, L_ind) - 합이 cross entropy
    """
    logits = forward(model, inputs).logits
    log_z = logsumexp(logits, axis=1)
    l_dep = float(-np.mean(np.sum(targets * logits, axis=1)))
    l_ind = float(np.mean(targets.sum(axis=1) * log_z))
    return l_dep, l_ind


def centering_term(model: FeedforwardModel, centering_inputs: np.ndarray) -> List[np.ndarray]:
    """레이어별 ḡ^l (균등 가중 역전파 한 번)"""
    fp = forward(model, centering_inputs)
    n, p = fp.logits.shape
    return backward(model, fp, np.full((n, p), 1.0 / p) / n).weights


def layer_jacobians(model: FeedforwardModel, inputs: np.ndarray, layer: int, fp: Optional[ForwardPass] = None) -> np.ndarray:
    """
    예시별 야코비안 J^l_{cα}(x) = ∂N_c / ∂z^l_α

    클래스 출력마다 역전파 한 번.

    Args:
        model: FeedforwardModel
        inputs: (B, D)
        layer: 1 ≤ l ≤ L
        fp: 순전파 (선택)

    Returns:
        (B, P, width_l)
    """
    n_layers = model.n_layers
    if not 1 <= layer <= n_layers:
        raise ConfigError(f"layer must be in [1, {n_layers}], got {layer}")
    fp = fp or forward(model, inputs)
    batch, n_classes = fp.logits.shape

    jac = np.empty((batch, n_classes, model.weights[layer - 1].shape[0]))
    for c in range(n_classes):
        d = np.zeros((batch, n_classes))
        d[:, c] = 1.0
        for k in range(n_layers - 1, layer - 1, -1):
            d = (d @ model.weights[k]) * (fp.pre[k - 1] > 0.0)
        jac[:, c, :] = d
    return jac


def _weighted_layer_grad(
    model: FeedforwardModel, fp: ForwardPass, weights: np.ndarray, layer: int, method: Method
) -> np.ndarray:
    """⟨(Jᵀ w) ⊗ φ^{l−1}⟩ (배치 평균)"""
    batch = weights.shape[0]
    if method == "sweep":
        return backward(model, fp, weights / batch).weights[layer - 1]
    jac = layer_jacobians(model, fp.post[0], layer, fp)
    upstream = np.einsum("bc,bca->ba", weights, jac)
    return upstream.T @ fp.post[layer - 1] / batch


def grad_parts(
    model: FeedforwardModel,
    inputs: np.ndarray,
    targets: np.ndarray,
    centering_inputs: Optional[np.ndarray] = None,
    layers: Optional[List[int]] = None,
    method: Method = "sweep",
) -> List[GradParts]:
    """
    레이어별 dep / ind 그래디언트

    Args:
        model: FeedforwardModel
        inputs: (B, D) 평가 배치
        targets: (B, P) 라벨 분포 P_L
        centering_inputs: ḡ 평균 집합 (기본값: 평가 배치 자신)
        layers: 계산할 레이어 (1-based, 기본값 전체)
        method: sweep (가중 역전파) 또는 jacobian (예시별 야코비안)

    Returns:
        GradParts 목록 (레이어 순)
    """
    if inputs.shape[0] == 0:
        raise ConfigError("grad_parts needs a non-empty batch")
    layers = list(range(1, model.n_layers + 1)) if layers is None else list(layers)
    for l in layers:
        if not 1 <= l <= model.n_layers:
            raise ConfigError(f"layer must be in [1, {model.n_layers}], got {l}")

    fp = forward(model, inputs)
    g_bar = centering_term(model, inputs if centering_inputs is None else centering_inputs)

    parts = []
    for l in layers:
        dep = -_weighted_layer_grad(model, fp, targets, l, method) + g_bar[l - 1]
        ind = _weighted_layer_grad(model, fp, fp.probs * targets.sum(axis=1, keepdims=True), l, method) - g_bar[l - 1]
        parts.append(GradParts(layer=l, dep=dep, ind=ind))
    return parts


def grad_parts_layer(
    model: FeedforwardModel,
    inputs: np.ndarray,
    targets: np.ndarray,
    layer: int,
    centering_inputs: Optional[np.ndarray] = None,
    method: Method = "sweep",
) -> GradParts:
    """레이어 l (1-based) 의 GradParts"""
    return grad_parts(model, inputs, targets, centering_inputs, layers=[layer], method=method)[0]


def grad_parts_final_layer(
    model: FeedforwardModel,
    inputs: np.ndarray,
    targets: np.ndarray,
    centering_inputs: Optional[np.ndarray] = None,
) -> GradParts:
    """
    마지막 레이어 직접 계산

    dep_{αβ} = −⟨P_L(α|x) φ_β⟩ + φ̄_β/P,  ind_{αβ} = ⟨P_M(α|x) φ_β⟩ − φ̄_β/P
    """
    fp = forward(model, inputs)
    phi = fp.post[-2]
    batch, n_classes = fp.logits.shape
    centering_phi = phi if centering_inputs is None else forward(model, centering_inputs).post[-2]
    g_bar = np.tile(centering_phi.mean(axis=0) / n_classes, (n_classes, 1))

    dep = -(targets.T @ phi) / batch + g_bar
    ind = ((fp.probs * targets.sum(axis=1, keepdims=True)).T @ phi) / batch - g_bar
    return GradParts(layer=model.n_layers, dep=dep, ind=ind)
