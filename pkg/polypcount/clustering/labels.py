from typing import Iterable, List


def canonical_labels(labels: Iterable[int]) -> List[int]:
    """Renumber cluster labels in order of first appearance."""
    mapping = {}
    return [mapping.setdefault(label, len(mapping)) for label in labels]


def count_entities(labels: Iterable[int]) -> int:
    """Number of distinct cluster labels."""
    count = len(set(labels))
    if count == 0:
        raise ValueError("cannot count entities of an empty labeling")
    return count
