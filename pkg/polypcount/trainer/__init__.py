"""Embedding head training."""

from .checkpoint import head_from_dict, head_to_dict, load_checkpoint, save_checkpoint
from .head import DenseLayer, EmbeddingHead
from .models import TrainerConfig
from .optim import AdamOptimizer, SgdOptimizer, make_optimizer
from .sampler import BatchInputs, TrainingSet, sample_batch
from .trainer import (
    TrainResult,
    batch_loss,
    embed_fragments,
    embed_tracklets,
    head_gradient_check,
    initialize_head,
    train,
    train_step,
)

__all__ = [
    "AdamOptimizer",
    "BatchInputs",
    "DenseLayer",
    "EmbeddingHead",
    "SgdOptimizer",
    "TrainResult",
    "TrainerConfig",
    "TrainingSet",
    "batch_loss",
    "embed_fragments",
    "embed_tracklets",
    "head_from_dict",
    "head_gradient_check",
    "head_to_dict",
    "initialize_head",
    "load_checkpoint",
    "make_optimizer",
    "sample_batch",
    "save_checkpoint",
    "train",
    "train_step",
]
