"""Visual similarity, temporal adjacency and their convex combination."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ConfigError, DataError, NumericalError


NORM_TOLERANCE = 1e-6
# identical embeddings must give exactly 1, not 1 - 1ulp
SIMILARITY_DECIMALS = 12


@dataclass
class TrackletDescriptor:
    """Clustering input for one tracklet.

    Attributes:
        tracklet_id: Tracklet identifier
        embedding: Unit-norm d-vector
        position: Tracklet position normalized by video length, in [0, 1]
    """

    tracklet_id: str
    embedding: np.ndarray
    position: float

    def __post_init__(self):
        self.embedding = np.asarray(self.embedding, dtype=float)
        if self.embedding.ndim != 1 or not np.all(np.isfinite(self.embedding)):
            raise DataError(f"tracklet {self.tracklet_id}: embedding must be a finite vector")
        norm = np.linalg.norm(self.embedding)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise DataError(f"tracklet {self.tracklet_id}: embedding norm {norm:.9g} is not 1")
        if not 0.0 <= self.position <= 1.0:
            raise DataError(f"tracklet {self.tracklet_id}: position {self.position} outside [0, 1]")


def _check_descriptors(descriptors: Sequence[TrackletDescriptor]) -> None:
    if not descriptors:
        raise DataError("at least one tracklet descriptor is required")
    dims = {d.embedding.shape[0] for d in descriptors}
    if len(dims) > 1:
        raise DataError(f"descriptors have mixed embedding dimensions {sorted(dims)}")


def visual_similarity(descriptors: Sequence[TrackletDescriptor]) -> np.ndarray:
    """Cosine similarity mapped to [0, 1] by (x + 1) / 2.

    Entries are rounded to 12 decimals.

    Returns:
        Symmetric N x N matrix with unit diagonal
    """
    _check_descriptors(descriptors)
    embeddings = np.stack([d.embedding for d in descriptors])
    V = (embeddings @ embeddings.T + 1.0) / 2.0
    V = np.clip(np.round((V + V.T) / 2.0, SIMILARITY_DECIMALS), 0.0, 1.0)
    np.fill_diagonal(V, 1.0)
    return V


def position_adjacency(positions: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma |p_i - p_j|) for a vector of positions."""
    if not gamma > 0:
        raise ConfigError(f"gamma must be positive, got {gamma}")
    positions = np.asarray(positions, dtype=float)
    return np.exp(-gamma * np.abs(positions[:, None] - positions[None, :]))


def temporal_adjacency(descriptors: Sequence[TrackletDescriptor], gamma: float) -> np.ndarray:
    """Temporal adjacency T of tracklet positions.

    Args:
        descriptors: Tracklet descriptors
        gamma: Penalty factor, > 0

    Returns:
        Symmetric N x N matrix with entries in (0, 1] and unit diagonal
    """
    _check_descriptors(descriptors)
    return position_adjacency(np.array([d.position for d in descriptors]), gamma)


def combine(V: np.ndarray, T: np.ndarray, alpha: float) -> np.ndarray:
    """S = alpha V + (1 - alpha) T."""
    if V.shape != T.shape:
        raise DataError(f"V {V.shape} and T {T.shape} differ in shape")
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must be in [0, 1], got {alpha}")
    S = alpha * V + (1.0 - alpha) * T
    if not np.all(np.isfinite(S)):
        raise NumericalError("similarity matrix has non-finite entries")
    return S


@dataclass
class SimilarityBundle:
    V: np.ndarray
    T: np.ndarray
    S: np.ndarray
    gamma: float
    alpha: float

    @classmethod
    def build(cls, descriptors: Sequence[TrackletDescriptor], gamma: float, alpha: float) -> "SimilarityBundle":
        V = visual_similarity(descriptors)
        T = temporal_adjacency(descriptors, gamma)
        return cls(V=V, T=T, S=combine(V, T, alpha), gamma=gamma, alpha=alpha)
