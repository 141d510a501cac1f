"""Contrastive loss with temporally-aware soft targets."""

from .contrastive import (
    EmbeddingBatch,
    LossConfig,
    LossMode,
    LossOutput,
    contrastive_loss,
    loss_and_gradient,
    match_distribution,
    target_distribution,
    target_matrix,
    temporal_distances,
)
from .gradcheck import check_batch, gradient_check, numeric_gradient, random_batch, relative_error

__all__ = [
    "EmbeddingBatch",
    "LossConfig",
    "LossMode",
    "LossOutput",
    "check_batch",
    "contrastive_loss",
    "gradient_check",
    "loss_and_gradient",
    "match_distribution",
    "numeric_gradient",
    "random_batch",
    "relative_error",
    "target_distribution",
    "target_matrix",
    "temporal_distances",
]
