"""Fragmentation rate and false-positive rate of a clustering."""

from collections import Counter, defaultdict
from typing import Callable, Dict, List, Sequence


def _check(labels: Sequence[int], entities: Sequence[str]) -> None:
    if len(labels) == 0:
        raise ValueError("labels must not be empty")
    if len(labels) != len(entities):
        raise ValueError(f"{len(labels)} labels but {len(entities)} ground-truth entities")


def _clusters(labels: Sequence[int], entities: Sequence[str]) -> List[Counter]:
    members: Dict[int, Counter] = defaultdict(Counter)
    for label, entity in zip(labels, entities):
        members[label][entity] += 1
    return list(members.values())


def fragmentation_rate(labels: Sequence[int], entities: Sequence[str]) -> float:
    """FR = |C| / |E|.

    Args:
        labels: Predicted cluster label per tracklet
        entities: True entity of each tracklet, aligned with ``labels``
    """
    _check(labels, entities)
    return len(set(labels)) / len(set(entities))


def false_positive_rate(labels: Sequence[int], entities: Sequence[str]) -> float:
    """Fraction of same-cluster tracklet pairs whose true entities differ.

    Returns:
        Impure-pair fraction in [0, 1]; 0 when no pair is merged
    """
    _check(labels, entities)
    merged = impure = 0
    for counts in _clusters(labels, entities):
        size = sum(counts.values())
        pairs = size * (size - 1) // 2
        merged += pairs
        impure += pairs - sum(c * (c - 1) // 2 for c in counts.values())
    return impure / merged if merged else 0.0


def wrong_merge_rate(labels: Sequence[int], entities: Sequence[str]) -> float:
    """Wrong merges over all merges.

    A cluster of s tracklets from e entities holds s - 1 merges, e - 1 of
    which join different entities.
    """
    _check(labels, entities)
    merges = wrong = 0
    for counts in _clusters(labels, entities):
        merges += sum(counts.values()) - 1
        wrong += len(counts) - 1
    return wrong / merges if merges else 0.0


FPR_METRICS: Dict[str, Callable[[Sequence[int], Sequence[str]], float]] = {
    "pair": false_positive_rate,
    "merge": wrong_merge_rate,
}
