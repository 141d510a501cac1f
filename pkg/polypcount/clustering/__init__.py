"""Similarity matrices and tracklet clustering (threshold, AP, temporal AP)."""

from .affinity import APResult, affinity_propagation, net_similarity
from .labels import canonical_labels, count_entities
from .pipeline import (
    ALGORITHMS,
    ClusteringConfig,
    ClusteringResult,
    cluster_matrix,
    cluster_tracklets,
    similarity_matrix,
)
from .similarity import (
    SimilarityBundle,
    TrackletDescriptor,
    combine,
    position_adjacency,
    temporal_adjacency,
    visual_similarity,
)
from .threshold import threshold_clustering

__all__ = [
    "ALGORITHMS",
    "APResult",
    "ClusteringConfig",
    "ClusteringResult",
    "SimilarityBundle",
    "TrackletDescriptor",
    "affinity_propagation",
    "canonical_labels",
    "cluster_matrix",
    "cluster_tracklets",
    "combine",
    "count_entities",
    "net_similarity",
    "position_adjacency",
    "similarity_matrix",
    "temporal_adjacency",
    "threshold_clustering",
    "visual_similarity",
]
