"""Affinity Propagation by responsibility/availability message passing."""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from ..errors import DataError, NumericalError
from .labels import canonical_labels


logger = logging.getLogger(__name__)

TIE_JITTER = 1e-12


@dataclass
class APResult:
    """Outcome of one Affinity Propagation run.

    Attributes:
        labels: Canonical cluster label per point
        exemplars: Exemplar index of each cluster, indexed by label
        converged: Whether the exemplar set stabilized before max_iterations
        iterations: Message-passing iterations run
    """

    labels: List[int]
    exemplars: List[int]
    converged: bool
    iterations: int = 0
    assignment: List[int] = field(default_factory=list, repr=False)


def _check_square(S: np.ndarray) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] == 0:
        raise DataError(f"similarity matrix must be square and non-empty, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise NumericalError("similarity matrix has non-finite entries")
    return S


def _assign(S: np.ndarray, exemplars: np.ndarray) -> np.ndarray:
    c = np.argmax(S[:, exemplars], axis=1)
    c[exemplars] = np.arange(len(exemplars))
    return c


def affinity_propagation(S: np.ndarray, preference: float, damping: float = 0.5,
                         max_iterations: int = 200, convergence_window: int = 15) -> APResult:
    """Cluster by Affinity Propagation.

    The scalar preference replaces the diagonal of S. A fixed jitter
    1e-12 * (i + j N) is added to every entry so that exact ties resolve
    the same way on every run. Messages are damped as
    ``R = damping * R + (1 - damping) * R_new`` (same for A).

    Args:
        S: N x N similarity matrix, higher is more similar
        preference: Self-similarity placed on the diagonal
        damping: Damping factor in [0.5, 1)
        max_iterations: Iteration limit
        convergence_window: Iterations the exemplar set must stay unchanged

    Returns:
        APResult; non-convergence is reported, not raised

    Raises:
        DataError: If S is not square
        NumericalError: If S or the preference is not finite
    """
    S = _check_square(S)
    if not np.isfinite(preference):
        raise NumericalError(f"preference must be finite, got {preference}")
    if not 0.5 <= damping < 1.0:
        raise ValueError(f"damping must be in [0.5, 1), got {damping}")

    n = S.shape[0]
    if n == 1:
        return APResult(labels=[0], exemplars=[0], converged=True, iterations=0, assignment=[0])

    S = S.copy()
    np.fill_diagonal(S, preference)
    i, j = np.indices((n, n))
    S += TIE_JITTER * (i + j * n)

    A = np.zeros((n, n))
    R = np.zeros((n, n))
    rows = np.arange(n)
    history = np.zeros((n, convergence_window), dtype=bool)
    converged = False

    it = 0
    for it in range(1, max_iterations + 1):
        # responsibilities
        tmp = A + S
        best = np.argmax(tmp, axis=1)
        first = tmp[rows, best]
        tmp[rows, best] = -np.inf
        second = np.max(tmp, axis=1)
        r_new = S - first[:, None]
        r_new[rows, best] = S[rows, best] - second
        R = damping * R + (1.0 - damping) * r_new

        # availabilities; tmp holds -A_new before clipping
        tmp = np.maximum(R, 0.0)
        tmp.flat[::n + 1] = R.flat[::n + 1]
        tmp -= tmp.sum(axis=0)
        self_avail = np.diag(tmp).copy()
        np.clip(tmp, 0.0, np.inf, out=tmp)
        tmp.flat[::n + 1] = self_avail
        A = damping * A - (1.0 - damping) * tmp

        is_exemplar = (np.diag(A) + np.diag(R)) > 0
        history[:, it % convergence_window] = is_exemplar
        if it >= convergence_window:
            stable = history.sum(axis=1)
            if np.all((stable == 0) | (stable == convergence_window)) and is_exemplar.any():
                converged = True
                break

    evidence = np.diag(A) + np.diag(R)
    exemplars = np.flatnonzero(evidence > 0)
    if len(exemplars) == 0:
        logger.warning("Affinity propagation found no exemplar; falling back to a single cluster")
        exemplars = np.array([int(np.argmax(evidence))])
    if not converged:
        logger.warning(f"Affinity propagation did not converge in {max_iterations} iterations")

    # refine each cluster's exemplar to the member with the best total similarity
    c = _assign(S, exemplars)
    for k in range(len(exemplars)):
        members = np.flatnonzero(c == k)
        exemplars[k] = members[np.argmax(S[np.ix_(members, members)].sum(axis=0))]
    c = _assign(S, exemplars)

    assignment = exemplars[c]
    labels = canonical_labels(assignment.tolist())
    ordered = [0] * len(set(labels))
    for label, exemplar in zip(labels, assignment):
        ordered[label] = int(exemplar)
    logger.debug(f"Affinity propagation: {len(ordered)} clusters after {it} iterations")
    return APResult(labels=labels, exemplars=ordered, converged=converged, iterations=it,
                    assignment=[int(a) for a in assignment])


def net_similarity(S: np.ndarray, exemplars: Sequence[int], preference: float) -> float:
    """Objective maximized by Affinity Propagation.

    Every non-exemplar contributes its similarity to its most similar
    exemplar; every exemplar contributes the preference.
    """
    S = _check_square(S)
    chosen = np.array(sorted(set(int(e) for e in exemplars)), dtype=int)
    if len(chosen) == 0:
        return float("-inf")
    others = np.setdiff1d(np.arange(S.shape[0]), chosen)
    total = preference * len(chosen)
    if len(others):
        total += S[np.ix_(others, chosen)].max(axis=1).sum()
    return float(total)
