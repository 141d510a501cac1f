"""Threshold association: connected components of the similarity graph."""

from typing import List

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import ConfigError
from .affinity import _check_square
from .labels import canonical_labels


def threshold_clustering(S: np.ndarray, theta: float) -> List[int]:
    """Connect i != j whenever S[i, j] >= theta and label the components.

    Returns:
        Canonical cluster label per point
    """
    if not 0.0 <= theta <= 1.0:
        raise ConfigError(f"threshold must be in [0, 1], got {theta}")
    S = _check_square(S)
    adjacency = S >= theta
    np.fill_diagonal(adjacency, False)
    _, labels = connected_components(csgraph=csr_matrix(adjacency), directed=False, return_labels=True)
    return canonical_labels(labels.tolist())
