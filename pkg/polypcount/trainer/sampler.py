"""Training set assembly and multi-view batch sampling."""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Set

import numpy as np

from ..errors import DataError
from ..loss import LossMode
from ..tracklets import Fragment, FragmentConfig, Tracklet, entity_spans, fragment_tracklets
from .models import TrainerConfig


logger = logging.getLogger(__name__)


@dataclass
class TrainingSet:
    """Fragment input features indexed by entity and by tracklet."""

    inputs: np.ndarray
    entity_ids: List[str]
    tracklet_ids: List[str]
    timestamps: np.ndarray
    entity_spans: Dict[str, float]
    by_entity: Dict[str, np.ndarray]
    by_tracklet: Dict[str, np.ndarray]
    short_entities_reported: Set[str] = field(default_factory=set, repr=False)

    @classmethod
    def from_fragments(cls, fragments: List[Fragment], spans: Mapping[str, float]) -> "TrainingSet":
        """Index fragments; each fragment's input is the mean of its frame features.

        Raises:
            DataError: If there are no fragments or a fragment lacks features
        """
        if not fragments:
            raise DataError("training set has no fragments; check kappa and tracklet lengths")
        by_entity: Dict[str, List[int]] = defaultdict(list)
        by_tracklet: Dict[str, List[int]] = defaultdict(list)
        for i, frag in enumerate(fragments):
            by_entity[frag.entity_id].append(i)
            by_tracklet[frag.parent].append(i)
        return cls(
            inputs=np.stack([frag.input_feature() for frag in fragments]),
            entity_ids=[frag.entity_id for frag in fragments],
            tracklet_ids=[frag.parent for frag in fragments],
            timestamps=np.array([frag.timestamp for frag in fragments]),
            entity_spans=dict(spans),
            by_entity={k: np.array(v) for k, v in sorted(by_entity.items())},
            by_tracklet={k: np.array(v) for k, v in sorted(by_tracklet.items())},
        )

    @classmethod
    def from_tracklets(cls, tracklets: List[Tracklet], cfg: FragmentConfig,
                       video_lengths: Mapping[str, int]) -> "TrainingSet":
        fragments, _ = fragment_tracklets(tracklets, cfg, video_lengths)
        return cls.from_fragments(fragments, entity_spans(tracklets, video_lengths))

    @property
    def input_dim(self) -> int:
        return self.inputs.shape[1]

    def __len__(self) -> int:
        return self.inputs.shape[0]


@dataclass
class BatchInputs:
    """Head inputs plus the labels an EmbeddingBatch needs."""

    features: np.ndarray
    entity_ids: List[str]
    timestamps: np.ndarray
    entity_spans: Dict[str, float]
    view_tags: List[str]


def _draw(pool: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.choice(pool, size=count, replace=len(pool) < count)


def sample_batch(dataset: TrainingSet, cfg: TrainerConfig, rng: np.random.Generator,
                 mode: LossMode = LossMode.TEMPORALLY_AWARE) -> BatchInputs:
    """Sample one batch of multiple views of multiple entities.

    Supervised modes draw ``polyps_per_batch`` entities without replacement
    and ``views_per_polyp`` fragments from each (with replacement when the
    entity has fewer). The self-supervised mode draws view pairs instead:
    two fragments from each of ``rows_per_batch // 2`` tracklets.

    Args:
        dataset: Training set
        cfg: Trainer configuration
        rng: Random generator, advanced in place
        mode: Loss mode the batch is for

    Returns:
        BatchInputs with rows_per_batch rows (rounded down to even for view pairs)

    Raises:
        DataError: If there are fewer entities than polyps_per_batch
    """
    if mode == LossMode.SELF_SUPERVISED:
        return _sample_view_pairs(dataset, cfg, rng)

    entities = list(dataset.by_entity)
    if len(entities) < cfg.polyps_per_batch:
        raise DataError(f"training set has {len(entities)} entities, "
                        f"fewer than polyps_per_batch={cfg.polyps_per_batch}")

    chosen = rng.choice(len(entities), size=cfg.polyps_per_batch, replace=False)
    rows = []
    for e in chosen:
        pool = dataset.by_entity[entities[e]]
        if len(pool) < cfg.views_per_polyp and entities[e] not in dataset.short_entities_reported:
            dataset.short_entities_reported.add(entities[e])
            logger.warning(f"Entity {entities[e]} has {len(pool)} fragments, sampling with replacement")
        rows.append(_draw(pool, cfg.views_per_polyp, rng))
    rows = np.concatenate(rows)
    return _gather(dataset, rows, [dataset.entity_ids[r] for r in rows])


def _sample_view_pairs(dataset: TrainingSet, cfg: TrainerConfig, rng: np.random.Generator) -> BatchInputs:
    tracklets = list(dataset.by_tracklet)
    n_pairs = max(1, cfg.rows_per_batch // 2)
    chosen = rng.choice(len(tracklets), size=n_pairs, replace=len(tracklets) < n_pairs)
    rows, tags = [], []
    for j, t in enumerate(chosen):
        rows.append(_draw(dataset.by_tracklet[tracklets[t]], 2, rng))
        tags.extend([f"pair{j}", f"pair{j}"])
    return _gather(dataset, np.concatenate(rows), tags)


def _gather(dataset: TrainingSet, rows: np.ndarray, view_tags: List[str]) -> BatchInputs:
    entity_ids = [dataset.entity_ids[r] for r in rows]
    return BatchInputs(
        features=dataset.inputs[rows],
        entity_ids=entity_ids,
        timestamps=dataset.timestamps[rows],
        entity_spans={e: dataset.entity_spans[e] for e in sorted(set(entity_ids))},
        view_tags=view_tags,
    )
