"""Clustering configuration and the tracklet-level clustering entry point."""

import logging
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .affinity import affinity_propagation
from .labels import count_entities
from .similarity import TrackletDescriptor, combine, position_adjacency, visual_similarity
from .threshold import threshold_clustering


logger = logging.getLogger(__name__)

ALGORITHMS = ("none", "threshold", "ap", "temporal_ap")


class ClusteringConfig(BaseModel):
    """Clustering algorithm and its hyperparameters."""

    model_config = ConfigDict(extra="forbid")

    algorithm: Literal["none", "threshold", "ap", "temporal_ap"] = "temporal_ap"
    threshold: float = Field(0.9, ge=0.0, le=1.0, description="Association threshold theta")
    preference: float = Field(0.0, description="AP self-similarity")
    gamma: float = Field(1.0, gt=0.0, description="Temporal penalty factor")
    alpha: float = Field(0.5, ge=0.0, le=1.0, description="Weight of visual similarity in S")
    damping: float = Field(0.5, ge=0.5, lt=1.0)
    max_iterations: int = Field(200, ge=1)
    convergence_window: int = Field(15, ge=1)


@dataclass
class ClusteringResult:
    """Cluster assignment of a set of tracklets."""

    labels: List[int]
    exemplars: List[int] = field(default_factory=list)
    converged: bool = True
    iterations: int = 0
    tracklet_ids: List[str] = field(default_factory=list)

    @property
    def n_clusters(self) -> int:
        return count_entities(self.labels)

    def to_dict(self):
        return {
            "n_clusters": self.n_clusters,
            "labels": dict(zip(self.tracklet_ids, self.labels)) if self.tracklet_ids else self.labels,
            "exemplars": [self.tracklet_ids[e] for e in self.exemplars] if self.tracklet_ids else self.exemplars,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def similarity_matrix(V: np.ndarray, positions: np.ndarray, cfg: ClusteringConfig) -> np.ndarray:
    """The matrix the configured algorithm clusters on.

    temporal_ap uses S = alpha V + (1 - alpha) T; every other algorithm uses V.
    """
    if cfg.algorithm == "temporal_ap":
        return combine(V, position_adjacency(positions, cfg.gamma), cfg.alpha)
    return V


def cluster_matrix(S: np.ndarray, cfg: ClusteringConfig) -> ClusteringResult:
    """Run the configured algorithm on a precomputed similarity matrix."""
    n = S.shape[0]
    if cfg.algorithm == "none":
        return ClusteringResult(labels=list(range(n)), exemplars=list(range(n)))
    if cfg.algorithm == "threshold":
        return ClusteringResult(labels=threshold_clustering(S, cfg.threshold))
    ap = affinity_propagation(S, cfg.preference, cfg.damping, cfg.max_iterations, cfg.convergence_window)
    return ClusteringResult(labels=ap.labels, exemplars=ap.exemplars, converged=ap.converged,
                            iterations=ap.iterations)


def cluster_tracklets(descriptors: Sequence[TrackletDescriptor],
                      cfg: Optional[ClusteringConfig] = None) -> ClusteringResult:
    """Cluster tracklets into entities.

    Args:
        descriptors: Tracklet descriptors of one video
        cfg: Clustering configuration

    Returns:
        ClusteringResult with labels in descriptor order
    """
    cfg = cfg or ClusteringConfig()
    V = visual_similarity(descriptors)
    positions = np.array([d.position for d in descriptors])
    result = cluster_matrix(similarity_matrix(V, positions, cfg), cfg)
    result.tracklet_ids = [d.tracklet_id for d in descriptors]
    logger.debug(f"{cfg.algorithm}: {len(descriptors)} tracklets -> {result.n_clusters} clusters")
    return result
