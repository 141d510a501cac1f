"""Small trainable embedding head: dense layers, nonlinearity, l2 normalization."""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..errors import NumericalError


ACTIVATIONS = ("tanh", "relu")


class DenseLayer:
    """Fully-connected layer ``x @ W + b`` with gradient buffers.

    Attributes:
        W, b: Parameters
        dW, db: Gradients from the last backward pass
    """

    def __init__(self, W: np.ndarray, b: np.ndarray):
        self.W = np.asarray(W, dtype=float)
        self.b = np.asarray(b, dtype=float)
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[1],):
            raise ValueError(f"incompatible layer shapes W{self.W.shape} b{self.b.shape}")
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)

    @classmethod
    def initialize(cls, input_dim: int, output_dim: int, rng: np.random.Generator) -> "DenseLayer":
        """Uniform init with limit 1/sqrt(input_dim), zero bias."""
        limit = 1.0 / math.sqrt(input_dim)
        return cls(rng.uniform(-limit, limit, (input_dim, output_dim)), np.zeros(output_dim))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.W.shape

    def forward(self, x: np.ndarray) -> np.ndarray:
        return x @ self.W + self.b

    def backward(self, x: np.ndarray, grad_output: np.ndarray) -> np.ndarray:
        """Store parameter gradients and return dL/dx."""
        self.dW = x.T @ grad_output
        self.db = grad_output.sum(axis=0)
        return grad_output @ self.W.T


def _activate(name: str, x: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(x)
    return np.maximum(x, 0.0)


def _activate_backward(name: str, pre: np.ndarray, post: np.ndarray, grad: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return grad * (1.0 - post ** 2)
    return grad * (pre > 0)


@dataclass
class ForwardCache:
    inputs: List[np.ndarray] = field(default_factory=list)
    pre: List[np.ndarray] = field(default_factory=list)
    post: List[np.ndarray] = field(default_factory=list)
    raw: Optional[np.ndarray] = None
    norms: Optional[np.ndarray] = None
    output: Optional[np.ndarray] = None


class EmbeddingHead:
    """Maps fragment input features to l2-normalized d-dimensional embeddings.

    Architecture: Dense(input -> hidden) -> activation -> Dense(hidden -> d)
    -> l2 normalization, or a single Dense(input -> d) when there is no
    hidden layer.
    """

    def __init__(self, layers: List[DenseLayer], activation: str = "tanh"):
        if not layers:
            raise ValueError("head needs at least one layer")
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}, expected one of {ACTIVATIONS}")
        for a, b in zip(layers, layers[1:]):
            if a.shape[1] != b.shape[0]:
                raise ValueError(f"layer shapes {a.shape} and {b.shape} do not chain")
        self.layers = layers
        self.activation = activation

    @classmethod
    def initialize(cls, input_dim: int, output_dim: int = 128, hidden_dim: int = 0,
                   activation: str = "tanh", seed: int = 0) -> "EmbeddingHead":
        """Create a freshly initialized head.

        Args:
            input_dim: Fragment feature dimension
            output_dim: Embedding dimension d
            hidden_dim: Hidden width; 0 for a single linear layer
            activation: "tanh" or "relu"
            seed: Initialization seed
        """
        rng = np.random.default_rng(seed)
        if hidden_dim > 0:
            layers = [DenseLayer.initialize(input_dim, hidden_dim, rng),
                      DenseLayer.initialize(hidden_dim, output_dim, rng)]
        else:
            layers = [DenseLayer.initialize(input_dim, output_dim, rng)]
        return cls(layers, activation)

    @property
    def input_dim(self) -> int:
        return self.layers[0].shape[0]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].shape[1]

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
        """Embed a batch of inputs, keeping what backward needs.

        Raises:
            NumericalError: If an output row is zero or non-finite
        """
        cache = ForwardCache()
        h = np.asarray(x, dtype=float)
        for i, layer in enumerate(self.layers):
            cache.inputs.append(h)
            h = layer.forward(h)
            if i < len(self.layers) - 1:
                cache.pre.append(h)
                h = _activate(self.activation, h)
                cache.post.append(h)

        norms = np.linalg.norm(h, axis=1, keepdims=True)
        if not np.all(np.isfinite(h)) or np.any(norms == 0.0):
            raise NumericalError("embedding head produced a zero or non-finite output row")
        cache.raw = h
        cache.norms = norms
        cache.output = h / norms
        return cache.output, cache

    def backward(self, cache: ForwardCache, grad_output: np.ndarray) -> None:
        """Backpropagate dL/d(normalized output) into every layer's dW, db."""
        y = cache.output
        # d(h/|h|)/dh applied to g: (g - y (y.g)) / |h|
        grad = (grad_output - y * np.sum(y * grad_output, axis=1, keepdims=True)) / cache.norms
        for i in reversed(range(len(self.layers))):
            if i < len(self.layers) - 1:
                grad = _activate_backward(self.activation, cache.pre[i], cache.post[i], grad)
            grad = self.layers[i].backward(cache.inputs[i], grad)

    def embed(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def parameters(self) -> List[np.ndarray]:
        params = []
        for layer in self.layers:
            params.extend([layer.W, layer.b])
        return params

    def gradients(self) -> List[np.ndarray]:
        grads = []
        for layer in self.layers:
            grads.extend([layer.dW, layer.db])
        return grads
