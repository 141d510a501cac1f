"""Shared fixtures and builders."""

import json
import os
from collections import defaultdict
from typing import List, Optional, Sequence

import numpy as np
import pytest
from click.testing import CliRunner

from polypcount.clustering import TrackletDescriptor
from polypcount.synth import ScenarioConfig, generate, write_scenario
from polypcount.trainer import TrainingSet
from polypcount.tracklets import DetectionRecord, Fragment


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    """No POLYPCOUNT_* variables and no config file in the working directory."""
    for name in list(os.environ):
        if name.upper().startswith("POLYPCOUNT_"):
            monkeypatch.delenv(name)
    monkeypatch.chdir(tmp_path)


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def make_records(frames: Sequence[int], video_id: str = "v", entity_id: str = "e",
                 box=(10.0, 10.0, 50.0, 50.0), dx: float = 0.5,
                 feature: Optional[Sequence[float]] = None) -> List[DetectionRecord]:
    """Detections of one entity moving ``dx`` pixels per frame."""
    records = []
    for f in frames:
        shifted = (box[0] + dx * f, box[1], box[2] + dx * f, box[3])
        records.append(DetectionRecord(video_id=video_id, frame_index=f, entity_id=entity_id,
                                       bbox=shifted, feature=tuple(feature) if feature is not None else None))
    return records


def make_fragment(parent: str, feature: Sequence[float], index: int = 0, kappa: int = 2,
                  timestamp: float = 0.5) -> Fragment:
    records = make_records(range(kappa), feature=feature)
    return Fragment(parent=parent, video_id="v", entity_id="e", index=index, frames=records,
                    timestamp=timestamp, features=[list(feature)] * kappa)


def make_training_set(n_entities: int = 4, per_entity: int = 6, dim: int = 6, noise: float = 0.05,
                      seed: int = 0) -> TrainingSet:
    """Entities at scaled one-hot centroids, two tracklets each."""
    rng = np.random.default_rng(seed)
    inputs, entity_ids, tracklet_ids, timestamps = [], [], [], []
    for k in range(n_entities):
        centroid = np.zeros(dim)
        centroid[k % dim] = 3.0
        for j in range(per_entity):
            inputs.append(centroid + noise * rng.standard_normal(dim))
            entity_ids.append(f"e{k}")
            tracklet_ids.append(f"e{k}/t{j % 2}")
            timestamps.append(0.1 * k + 0.01 * j)
    by_entity, by_tracklet = defaultdict(list), defaultdict(list)
    for i, (e, t) in enumerate(zip(entity_ids, tracklet_ids)):
        by_entity[e].append(i)
        by_tracklet[t].append(i)
    return TrainingSet(
        inputs=np.array(inputs),
        entity_ids=entity_ids,
        tracklet_ids=tracklet_ids,
        timestamps=np.array(timestamps),
        entity_spans={e: 0.5 for e in by_entity},
        by_entity={k: np.array(v) for k, v in by_entity.items()},
        by_tracklet={k: np.array(v) for k, v in by_tracklet.items()},
    )


def one_hot_descriptors(entity_of: Sequence[int], dim: int = 8, prefix: str = "t") -> List[TrackletDescriptor]:
    """Descriptors whose embedding is the one-hot vector of their entity."""
    descriptors = []
    n = len(entity_of)
    for i, entity in enumerate(entity_of):
        embedding = np.zeros(dim)
        embedding[entity] = 1.0
        descriptors.append(TrackletDescriptor(f"{prefix}{i}", embedding, (i + 0.5) / n))
    return descriptors


EASY_SCENARIO = dict(
    n_videos=3, n_train_videos=3, entities_per_video=(2, 2), tracklets_per_entity=(2, 2),
    tracklet_length=(48, 64), gap_length=(10, 20), video_length=600, feature_dim=8,
    sigma=0.0, beta=0.0, inter_entity_min_distance=1.0, seed=7,
)


@pytest.fixture(scope="session")
def easy_config() -> ScenarioConfig:
    return ScenarioConfig(**EASY_SCENARIO)


@pytest.fixture(scope="session")
def easy_data(tmp_path_factory, easy_config):
    """Data directory of a small noise-free scenario."""
    out = tmp_path_factory.mktemp("easy")
    write_scenario(generate(easy_config), out)
    return out


@pytest.fixture
def runner():
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


def stdout_json(result):
    assert result.exit_code == 0, result.stderr
    return json.loads(result.stdout)


def stderr_json(result):
    return json.loads(result.stderr.strip().splitlines()[-1])
