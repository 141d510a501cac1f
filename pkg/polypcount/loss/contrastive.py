"""Temporally-aware supervised contrastive loss.

Every batch element acts as an anchor against the other B-1 elements. The
match distribution q is a temperature-scaled softmax over candidate dot
products; the target distribution p spreads mass over matching candidates,
weighted by exp(-lambda * d) where d is the temporal distance to the anchor
in units of the anchor entity's span. The loss is the cross-entropy H(p, q)
averaged over anchors with at least one match.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import logsumexp

from ..errors import DegenerateBatchError, InvalidBatchError


logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-6


class LossMode(str, Enum):
    SELF_SUPERVISED = "self_supervised"
    SUPERVISED = "supervised"
    TEMPORALLY_AWARE = "temporally_aware"


class LossConfig(BaseModel):
    """Contrastive loss settings."""

    model_config = ConfigDict(extra="forbid")

    tau: float = Field(0.1, gt=0.0, description="Softmax temperature")
    lam: float = Field(1.0, ge=0.0, description="Temporal scaling of the soft targets")
    mode: LossMode = LossMode.TEMPORALLY_AWARE

    @property
    def effective_lambda(self) -> float:
        """Lambda actually used; only the temporally-aware mode weights by time."""
        return self.lam if self.mode == LossMode.TEMPORALLY_AWARE else 0.0


@dataclass
class EmbeddingBatch:
    """B l2-normalized embeddings with labels and temporal metadata.

    Attributes:
        embeddings: B x d matrix, unit-norm rows
        entity_ids: Entity label per row
        timestamps: Video-normalized timestamp per row
        entity_spans: Normalized span P of every entity in the batch
        view_tags: View-pair tag per row, required by the self-supervised mode
    """

    embeddings: np.ndarray
    entity_ids: List[str]
    timestamps: np.ndarray
    entity_spans: Dict[str, float]
    view_tags: Optional[List[str]] = None

    def __post_init__(self):
        self.embeddings = np.asarray(self.embeddings, dtype=float)
        self.timestamps = np.asarray(self.timestamps, dtype=float)
        self.entity_ids = list(self.entity_ids)

        if self.embeddings.ndim != 2:
            raise InvalidBatchError(f"embeddings must be a B x d matrix, got shape {self.embeddings.shape}")
        size = self.embeddings.shape[0]
        if size < 2:
            raise InvalidBatchError(f"batch needs at least 2 elements, got {size}")
        if len(self.entity_ids) != size or self.timestamps.shape != (size,):
            raise InvalidBatchError("entity_ids and timestamps must have one entry per embedding row")
        if self.view_tags is not None and len(self.view_tags) != size:
            raise InvalidBatchError("view_tags must have one entry per embedding row")
        if not np.all(np.isfinite(self.embeddings)):
            raise InvalidBatchError("embeddings contain non-finite values")

        norms = np.linalg.norm(self.embeddings, axis=1)
        if np.any(np.abs(norms - 1.0) > NORM_TOLERANCE):
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise InvalidBatchError(f"row {worst} has norm {norms[worst]:.9g}; rows must be l2-normalized")

        for entity in set(self.entity_ids):
            span = self.entity_spans.get(entity)
            if span is None or not span > 0:
                raise InvalidBatchError(f"entity {entity!r} has no positive span")

    @property
    def size(self) -> int:
        return self.embeddings.shape[0]


@dataclass
class LossOutput:
    """Loss value, per-anchor terms and gradient w.r.t. the normalized rows.

    ``per_anchor`` is 0 for anchors without matches; ``valid`` flags the
    anchors that enter the mean.
    """

    loss: float
    per_anchor: np.ndarray
    valid: np.ndarray
    gradient: np.ndarray
    targets: np.ndarray = field(repr=False)


def _candidates(anchor_idx: int, size: int) -> np.ndarray:
    if not 0 <= anchor_idx < size:
        raise IndexError(f"anchor index {anchor_idx} out of range for batch of {size}")
    return np.delete(np.arange(size), anchor_idx)


def _log_match_matrix(embeddings: np.ndarray, tau: float) -> np.ndarray:
    """Row-wise log-softmax of E E^T / tau with the diagonal excluded (-inf)."""
    logits = embeddings @ embeddings.T / tau
    np.fill_diagonal(logits, -np.inf)
    return logits - logsumexp(logits, axis=1, keepdims=True)


def match_distribution(anchor_idx: int, batch: EmbeddingBatch, tau: float) -> np.ndarray:
    """Softmax match probabilities of one anchor over the other B-1 rows.

    Args:
        anchor_idx: Row index of the anchor
        batch: Embedding batch
        tau: Temperature

    Returns:
        Probability vector over candidates, in batch order without the anchor
    """
    candidates = _candidates(anchor_idx, batch.size)
    logits = batch.embeddings[candidates] @ batch.embeddings[anchor_idx] / tau
    return np.exp(logits - logsumexp(logits))


def _match_mask(batch: EmbeddingBatch, mode: LossMode) -> np.ndarray:
    if mode == LossMode.SELF_SUPERVISED:
        if batch.view_tags is None:
            raise InvalidBatchError("self_supervised mode needs view_tags on the batch")
        labels = np.asarray(batch.view_tags, dtype=object)
    else:
        labels = np.asarray(batch.entity_ids, dtype=object)
    mask = labels[:, None] == labels[None, :]
    np.fill_diagonal(mask, False)
    return mask


def _distance_matrix(batch: EmbeddingBatch) -> np.ndarray:
    spans = np.array([batch.entity_spans[e] for e in batch.entity_ids], dtype=float)
    pi = batch.timestamps
    return np.abs(pi[None, :] - pi[:, None]) / spans[:, None]


def temporal_distances(anchor_idx: int, batch: EmbeddingBatch) -> np.ndarray:
    """Temporal distance of every candidate to the anchor, in anchor-span units.

    Returns:
        Vector |pi_i - pi_anchor| / P_anchor over candidates
    """
    candidates = _candidates(anchor_idx, batch.size)
    span = batch.entity_spans.get(batch.entity_ids[anchor_idx])
    if span is None or not span > 0:
        raise InvalidBatchError(f"entity {batch.entity_ids[anchor_idx]!r} has no positive span")
    return np.abs(batch.timestamps[candidates] - batch.timestamps[anchor_idx]) / span


def target_matrix(batch: EmbeddingBatch, cfg: LossConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Soft target distributions of every anchor.

    Args:
        batch: Embedding batch
        cfg: Loss configuration

    Returns:
        Tuple of (B x B target matrix with zero diagonal, valid-anchor mask)

    Raises:
        DegenerateBatchError: If no anchor has a matching candidate
    """
    mask = _match_mask(batch, cfg.mode)
    lam = cfg.effective_lambda

    if lam == 0.0:
        weights = mask.astype(float)
    else:
        distances = _distance_matrix(batch)
        # shift by the nearest match so that far-only rows cannot underflow to zero
        nearest = np.where(mask, distances, np.inf).min(axis=1, keepdims=True)
        nearest[~np.isfinite(nearest)] = 0.0
        weights = np.where(mask, np.exp(-lam * (distances - nearest)), 0.0)

    totals = weights.sum(axis=1)
    valid = totals > 0
    if not valid.any():
        raise DegenerateBatchError("no anchor in the batch has a matching candidate")

    targets = np.zeros_like(weights)
    targets[valid] = weights[valid] / totals[valid, None]
    return targets, valid


def target_distribution(anchor_idx: int, batch: EmbeddingBatch, cfg: LossConfig) -> np.ndarray:
    """Soft target distribution of one anchor over its candidates.

    Returns:
        Probability vector over candidates; all zeros when the anchor has no match
    """
    candidates = _candidates(anchor_idx, batch.size)
    targets, _ = target_matrix(batch, cfg)
    return targets[anchor_idx, candidates]


def loss_and_gradient(embeddings: np.ndarray, targets: np.ndarray, valid: np.ndarray,
                      tau: float) -> Tuple[float, np.ndarray, np.ndarray]:
    """Cross-entropy loss and its gradient for fixed targets.

    No normalization is applied to ``embeddings``: the gradient is taken
    with respect to the rows as given.

    Args:
        embeddings: B x d matrix
        targets: B x B target matrix with zero diagonal
        valid: Boolean mask of anchors entering the mean
        tau: Temperature

    Returns:
        Tuple of (mean loss, per-anchor losses, B x d gradient)
    """
    log_q = _log_match_matrix(embeddings, tau)
    q = np.exp(log_q)
    np.fill_diagonal(log_q, 0.0)

    per_anchor = -(targets * log_q).sum(axis=1)
    per_anchor[~valid] = 0.0
    n_valid = int(valid.sum())
    loss = float(per_anchor[valid].sum() / n_valid)

    # d H_i / d logit_ij = q_ij - p_ij; logit_ij = e_i . e_j / tau
    coupling = (q - targets) * valid[:, None]
    gradient = (coupling + coupling.T) @ embeddings / (tau * n_valid)
    return loss, per_anchor, gradient


def contrastive_loss(batch: EmbeddingBatch, cfg: LossConfig) -> LossOutput:
    """Evaluate the contrastive loss and its analytic gradient.

    Args:
        batch: Embedding batch
        cfg: Loss configuration

    Returns:
        LossOutput with mean loss, per-anchor terms and gradient
    """
    targets, valid = target_matrix(batch, cfg)
    if not valid.all():
        logger.debug(f"{int((~valid).sum())} anchors without matches excluded from the loss")
    loss, per_anchor, gradient = loss_and_gradient(batch.embeddings, targets, valid, cfg.tau)
    return LossOutput(loss=loss, per_anchor=per_anchor, valid=valid, gradient=gradient, targets=targets)
