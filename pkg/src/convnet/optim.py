"""
Adam optimizer with the conv box constraint applied after every step.
"""
from typing import Dict

import numpy as np

from src.convnet.config import TrainConfig
from src.convnet.model import CnnModel


class Adam:
    """Adam over the two parameter tensors of a CnnModel."""

    def __init__(self, config: TrainConfig):
        self.lr = config.learning_rate
        self.beta1 = config.beta1
        self.beta2 = config.beta2
        self.epsilon = config.epsilon
        self.steps = 0
        self._m: Dict[str, np.ndarray] = {}
        self._v: Dict[str, np.ndarray] = {}

    def _update(self, name: str, param: np.ndarray, grad: np.ndarray) -> None:
        m = self._m.setdefault(name, np.zeros_like(param))
        v = self._v.setdefault(name, np.zeros_like(param))
        m *= self.beta1
        m += (1.0 - self.beta1) * grad
        v *= self.beta2
        v += (1.0 - self.beta2) * grad * grad

        m_hat = m / (1.0 - self.beta1 ** self.steps)
        v_hat = v / (1.0 - self.beta2 ** self.steps)
        param -= self.lr * m_hat / (np.sqrt(v_hat) + self.epsilon)

    def step(self, model: CnnModel, grads) -> None:
        """Update model in place, then clip the conv weights to [-1, 1]. Dense weights are unbounded."""
        self.steps += 1
        self._update("conv", model.conv_kernels, grads.conv)
        self._update("dense", model.dense_weights, grads.dense)
        model.clip_conv()
