"""Trainer configuration."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class TrainerConfig(BaseModel):
    """Training and batch-composition settings."""

    model_config = ConfigDict(extra="forbid")

    batch_size: int = Field(56, ge=4, description="Batch capacity")
    views_per_polyp: int = Field(14, ge=2, description="Fragments drawn per entity (K)")
    polyps_per_batch: int = Field(3, ge=1, description="Distinct entities per batch")
    epochs: int = Field(50, ge=1)
    batches_per_epoch: int = Field(10, ge=1)
    learning_rate: float = Field(1e-3, ge=0.0)
    optimizer: Literal["sgd", "adam"] = "adam"
    seed: int = 0
    embedding_dim: int = Field(128, ge=1, description="Embedding dimension d")
    hidden_dim: int = Field(64, ge=0, description="Hidden width; 0 for a linear head")
    activation: Literal["tanh", "relu"] = "tanh"

    @model_validator(mode="after")
    def check_capacity(self):
        if self.views_per_polyp * self.polyps_per_batch > self.batch_size:
            raise ValueError(
                f"views_per_polyp x polyps_per_batch = {self.views_per_polyp * self.polyps_per_batch} "
                f"exceeds batch_size {self.batch_size}")
        return self

    @property
    def rows_per_batch(self) -> int:
        return self.views_per_polyp * self.polyps_per_batch

