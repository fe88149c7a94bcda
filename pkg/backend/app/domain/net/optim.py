"""
Optimizers

Adam / full-batch gradient descent (in-place 업데이트)
"""
from typing import List

import numpy as np

from app.domain.net.schemas import FeedforwardModel, Gradients, TrainConfig


class GradientDescent:
    """단순 경사하강"""

    def __init__(self, learning_rate: float):
        self.learning_rate = learning_rate

    def step(self, model: FeedforwardModel, grads: Gradients) -> None:
        for w, g in zip(model.weights, grads.weights):
            w -= self.learning_rate * g
        if model.biases is not None and grads.biases is not None:
            for b, g in zip(model.biases, grads.biases):
                b -= self.learning_rate * g


class Adam:
    """Adam (β1=0.9, β2=0.999, ε=1e-8)"""

    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: List[np.ndarray] = []
        self._v: List[np.ndarray] = []

    def _params(self, model: FeedforwardModel, grads: Gradients):
        params = list(model.weights)
        grad_list = list(grads.weights)
        if model.biases is not None and grads.biases is not None:
            params += model.biases
            grad_list += grads.biases
        return params, grad_list

    def step(self, model: FeedforwardModel, grads: Gradients) -> None:
        params, grad_list = self._params(model, grads)
        if not self._m:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]

        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grad_list, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + self.eps)


def get_optimizer(cfg: TrainConfig):
    """TrainConfig 에 맞는 옵티마이저 생성"""
    if cfg.optimizer == "adam":
        return Adam(cfg.learning_rate)
    return GradientDescent(cfg.learning_rate)
