"""Finite-difference verification of the analytic loss gradient."""

import logging
from typing import Callable, Dict, Iterable, Optional

import numpy as np

from .contrastive import EmbeddingBatch, LossConfig, LossMode, contrastive_loss, loss_and_gradient, target_matrix


logger = logging.getLogger(__name__)

FD_EPSILON = 1e-5


def numeric_gradient(func: Callable[[np.ndarray], float], x: np.ndarray,
                     epsilon: float = FD_EPSILON) -> np.ndarray:
    """Central-difference gradient of a scalar function.

    Args:
        func: Scalar function of an array
        x: Point to differentiate at (not modified)
        epsilon: Step size

    Returns:
        Array of the same shape as ``x``
    """
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    for idx in range(x.size):
        original = x.flat[idx]
        x.flat[idx] = original + epsilon
        f_plus = func(x)
        x.flat[idx] = original - epsilon
        f_minus = func(x)
        x.flat[idx] = original
        grad.flat[idx] = (f_plus - f_minus) / (2 * epsilon)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Largest entry-wise difference, scaled by the largest gradient entry."""
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), 1e-12)
    return float(np.max(np.abs(analytic - numeric)) / scale)


def random_batch(rng: np.random.Generator, max_size: int = 16, max_dim: int = 8) -> EmbeddingBatch:
    """Random unit-norm batch with at least one matching pair and view pairs."""
    size = int(rng.integers(4, max_size + 1))
    dim = int(rng.integers(2, max_dim + 1))
    n_entities = int(rng.integers(2, max(2, size // 2) + 1))

    embeddings = rng.standard_normal((size, dim))
    embeddings /= np.linalg.norm(embeddings, axis=1, keepdims=True)

    labels = rng.integers(0, n_entities, size)
    labels[1] = labels[0]
    entity_ids = [f"e{label}" for label in labels]
    timestamps = rng.uniform(0.0, 1.0, size)
    spans = {}
    for entity in set(entity_ids):
        own = timestamps[[e == entity for e in entity_ids]]
        spans[entity] = float(own.max() - own.min()) + 0.05

    view_tags = [f"v{i // 2}" for i in range(size)]
    return EmbeddingBatch(embeddings, entity_ids, timestamps, spans, view_tags)


def check_batch(batch: EmbeddingBatch, cfg: LossConfig, epsilon: float = FD_EPSILON) -> float:
    """Relative error between analytic and numeric gradient on one batch."""
    targets, valid = target_matrix(batch, cfg)
    analytic = contrastive_loss(batch, cfg).gradient

    def loss_at(embeddings):
        return loss_and_gradient(embeddings, targets, valid, cfg.tau)[0]

    numeric = numeric_gradient(loss_at, batch.embeddings, epsilon)
    return relative_error(analytic, numeric)


def gradient_check(n_batches: int = 100, seed: int = 0,
                   modes: Optional[Iterable[LossMode]] = None) -> Dict[str, float]:
    """Run the finite-difference check over random batches for every mode.

    Args:
        n_batches: Random batches per mode
        seed: Seed of the batch generator
        modes: Loss modes to check (default: all three)

    Returns:
        Max relative error per mode, plus the overall maximum under "max"
    """
    rng = np.random.default_rng(seed)
    modes = list(modes or LossMode)
    errors: Dict[str, float] = {}
    for mode in modes:
        worst = 0.0
        for _ in range(n_batches):
            batch = random_batch(rng)
            cfg = LossConfig(tau=float(rng.uniform(0.1, 1.0)), lam=float(rng.uniform(0.0, 2.0)), mode=mode)
            worst = max(worst, check_batch(batch, cfg))
        errors[mode.value] = worst
        logger.info(f"Gradient check {mode.value}: max relative error {worst:.3e} over {n_batches} batches")
    errors["max"] = max(errors.values())
    return errors
