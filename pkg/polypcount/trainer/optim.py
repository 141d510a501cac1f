"""Gradient-descent optimizers over an EmbeddingHead's parameters."""

from typing import List

import numpy as np

from .head import EmbeddingHead


class SgdOptimizer:
    """Plain stochastic gradient descent."""

    def __init__(self, head: EmbeddingHead, lr: float = 1e-3):
        self.head = head
        self.lr = lr

    def step(self) -> None:
        for param, grad in zip(self.head.parameters(), self.head.gradients()):
            param -= self.lr * grad


class AdamOptimizer:
    """Adam with bias-corrected moment estimates.

    Args:
        head: Head whose parameters are updated in place
        lr: Learning rate
        beta1: Exponential decay for first moment
        beta2: Exponential decay for second moment
        eps: Numerical stability term
    """

    def __init__(self, head: EmbeddingHead, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.head = head
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: List[np.ndarray] = [np.zeros_like(p) for p in head.parameters()]
        self.v: List[np.ndarray] = [np.zeros_like(p) for p in head.parameters()]

    def step(self) -> None:
        self.t += 1
        for param, grad, m, v in zip(self.head.parameters(), self.head.gradients(), self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * grad
            v *= self.beta2
            v += (1 - self.beta2) * grad ** 2
            m_hat = m / (1 - self.beta1 ** self.t)
            v_hat = v / (1 - self.beta2 ** self.t)
            param -= self.lr * (m_hat / (np.sqrt(v_hat) + self.eps))


def make_optimizer(name: str, head: EmbeddingHead, lr: float):
    if name == "sgd":
        return SgdOptimizer(head, lr)
    if name == "adam":
        return AdamOptimizer(head, lr)
    raise ValueError(f"unknown optimizer {name!r}")
