"""Training loop, head gradient check and embedding of fragments and tracklets."""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..errors import DataError, NumericalError
from ..loss import EmbeddingBatch, LossConfig, LossMode, contrastive_loss, loss_and_gradient, target_matrix
from ..loss.gradcheck import relative_error
from ..tracklets import Fragment
from .head import EmbeddingHead
from .models import TrainerConfig
from .optim import make_optimizer
from .sampler import BatchInputs, TrainingSet, sample_batch


logger = logging.getLogger(__name__)

HEAD_CHECK_EPSILON = 1e-6


@dataclass
class TrainResult:
    """Trained head with its loss curves.

    Attributes:
        head: Trained head (the instance passed to ``train``, updated in place)
        losses: Mean training loss per epoch
        holdout_losses: Loss on the fixed held-out batch after each epoch
    """

    head: EmbeddingHead
    losses: List[float] = field(default_factory=list)
    holdout_losses: List[float] = field(default_factory=list)


def initialize_head(dataset: TrainingSet, cfg: TrainerConfig) -> EmbeddingHead:
    return EmbeddingHead.initialize(dataset.input_dim, cfg.embedding_dim, cfg.hidden_dim,
                                    cfg.activation, cfg.seed)


def _embedding_batch(inputs: BatchInputs, embeddings: np.ndarray) -> EmbeddingBatch:
    return EmbeddingBatch(embeddings, inputs.entity_ids, inputs.timestamps,
                          inputs.entity_spans, inputs.view_tags)


def batch_loss(head: EmbeddingHead, inputs: BatchInputs, loss_cfg: LossConfig) -> float:
    """Loss of one batch without touching the head's gradients."""
    embeddings = head.embed(inputs.features)
    return contrastive_loss(_embedding_batch(inputs, embeddings), loss_cfg).loss


def train_step(head: EmbeddingHead, inputs: BatchInputs, loss_cfg: LossConfig, optimizer) -> float:
    """One forward/backward pass and optimizer update.

    Returns:
        Batch loss before the update

    Raises:
        NumericalError: If the loss or its gradient is not finite
    """
    embeddings, cache = head.forward(inputs.features)
    out = contrastive_loss(_embedding_batch(inputs, embeddings), loss_cfg)
    if not np.isfinite(out.loss) or not np.all(np.isfinite(out.gradient)):
        raise NumericalError(f"non-finite loss {out.loss}; the learning rate is probably too high",
                             learning_rate=getattr(optimizer, "lr", None))
    head.backward(cache, out.gradient)
    optimizer.step()
    return out.loss


def train(dataset: TrainingSet, head: EmbeddingHead, loss_cfg: LossConfig, cfg: TrainerConfig) -> TrainResult:
    """Train the head with the contrastive loss.

    Batches come from ``default_rng(cfg.seed)``; the held-out batch is drawn
    once from an independent stream derived from the same seed, so a fixed
    seed gives an identical loss curve.

    Args:
        dataset: Training set
        head: Head to train, updated in place
        loss_cfg: Loss configuration
        cfg: Trainer configuration

    Returns:
        TrainResult with per-epoch mean and held-out losses

    Raises:
        DataError: If the head does not match the dataset features
        NumericalError: If the loss diverges
    """
    if head.input_dim != dataset.input_dim:
        raise DataError(f"head expects {head.input_dim}-dim inputs, training features are {dataset.input_dim}-dim")

    rng = np.random.default_rng(cfg.seed)
    holdout = sample_batch(dataset, cfg, np.random.default_rng([cfg.seed, 1]), loss_cfg.mode)
    optimizer = make_optimizer(cfg.optimizer, head, cfg.learning_rate)
    result = TrainResult(head=head)

    logger.info(f"Training {loss_cfg.mode.value} head on {len(dataset)} fragments of "
                f"{len(dataset.by_entity)} entities for {cfg.epochs} epochs")
    for epoch in range(cfg.epochs):
        losses = [train_step(head, sample_batch(dataset, cfg, rng, loss_cfg.mode), loss_cfg, optimizer)
                  for _ in range(cfg.batches_per_epoch)]
        result.losses.append(float(np.mean(losses)))
        result.holdout_losses.append(batch_loss(head, holdout, loss_cfg))
        logger.debug(f"Epoch {epoch + 1}/{cfg.epochs}: loss {result.losses[-1]:.6f}, "
                     f"held-out {result.holdout_losses[-1]:.6f}")

    logger.info(f"Training done: loss {result.losses[0]:.4f} -> {result.losses[-1]:.4f}")
    return result


def head_gradient_check(seed: int = 0, loss_cfg: Optional[LossConfig] = None,
                        epsilon: float = HEAD_CHECK_EPSILON) -> float:
    """Compare backprop through normalization and layers with central differences.

    Uses a tiny head (4 inputs, 5 hidden units, 3 outputs) on a six-row batch
    of three entities.

    Returns:
        Relative error over all head parameters
    """
    loss_cfg = loss_cfg or LossConfig(tau=0.5, lam=1.0)
    rng = np.random.default_rng(seed)
    head = EmbeddingHead.initialize(4, 3, hidden_dim=5, activation="tanh", seed=seed)
    inputs = BatchInputs(
        features=rng.standard_normal((6, 4)),
        entity_ids=["a", "a", "b", "b", "c", "c"],
        timestamps=rng.uniform(0.0, 1.0, 6),
        entity_spans={"a": 0.5, "b": 0.3, "c": 0.8},
        view_tags=["v0", "v0", "v1", "v1", "v2", "v2"],
    )

    embeddings, cache = head.forward(inputs.features)
    batch = _embedding_batch(inputs, embeddings)
    targets, valid = target_matrix(batch, loss_cfg)
    head.backward(cache, contrastive_loss(batch, loss_cfg).gradient)
    analytic = np.concatenate([g.ravel() for g in head.gradients()])

    numeric = []
    for param in head.parameters():
        for idx in range(param.size):
            original = param.flat[idx]
            param.flat[idx] = original + epsilon
            f_plus = loss_and_gradient(head.embed(inputs.features), targets, valid, loss_cfg.tau)[0]
            param.flat[idx] = original - epsilon
            f_minus = loss_and_gradient(head.embed(inputs.features), targets, valid, loss_cfg.tau)[0]
            param.flat[idx] = original
            numeric.append((f_plus - f_minus) / (2 * epsilon))

    error = relative_error(analytic, np.array(numeric))
    logger.info(f"Head gradient check: relative error {error:.3e}")
    return error


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(norms == 0.0) or not np.all(np.isfinite(x)):
        raise NumericalError("cannot normalize a zero or non-finite embedding")
    return x / norms


def embed_fragments(head: Optional[EmbeddingHead], fragments: Sequence[Fragment]) -> np.ndarray:
    """Embed fragments; with no head the normalized input feature is the embedding.

    Returns:
        len(fragments) x d matrix of unit-norm rows
    """
    if not fragments:
        raise DataError("no fragments to embed")
    inputs = np.stack([frag.input_feature() for frag in fragments])
    if head is None:
        return _normalize_rows(inputs)
    if head.input_dim != inputs.shape[1]:
        raise DataError(f"head expects {head.input_dim}-dim inputs, fragments are {inputs.shape[1]}-dim")
    return head.embed(inputs)


def embed_tracklets(head: Optional[EmbeddingHead], fragments: Sequence[Fragment]) -> Dict[str, np.ndarray]:
    """Tracklet embedding = normalized mean of its fragments' embeddings.

    Returns:
        Map tracklet_id -> unit-norm embedding, in first-appearance order
    """
    embeddings = embed_fragments(head, fragments)
    rows: Dict[str, List[int]] = defaultdict(list)
    for i, frag in enumerate(fragments):
        rows[frag.parent].append(i)
    means = np.stack([embeddings[idx].mean(axis=0) for idx in rows.values()])
    return dict(zip(rows, _normalize_rows(means)))
