"""Synthetic scenarios with planted entities, tracklets and frame features."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import ScenarioError
from ..serialization import PathLike, write_json
from ..tracklets import DetectionRecord, FragmentConfig, build_tracklets, write_detections


logger = logging.getLogger(__name__)

MAX_PLACEMENT_ATTEMPTS = 1000
DETECTIONS_FILE = "detections.jsonl"
TRUTH_FILE = "truth.json"


class ScenarioConfig(BaseModel):
    """Shape and noise of a synthetic scenario.

    ``n_videos`` evaluation videos are generated after ``n_train_videos``
    training videos.
    """

    model_config = ConfigDict(extra="forbid")

    n_videos: int = Field(6, ge=1, description="Evaluation videos")
    n_train_videos: int = Field(4, ge=0, description="Training videos")
    entities_per_video: Tuple[int, int] = (1, 4)
    tracklets_per_entity: Tuple[int, int] = (1, 3)
    tracklet_length: Tuple[int, int] = (40, 120)
    gap_length: Tuple[int, int] = (5, 60)
    video_length: int = Field(3000, ge=1)
    frame_size: Tuple[float, float] = (640.0, 480.0)
    feature_dim: int = Field(32, ge=1)
    sigma: float = Field(0.05, ge=0.0, allow_inf_nan=False, description="Intra-entity feature noise")
    beta: float = Field(0.0, ge=0.0, allow_inf_nan=False, description="Feature drift per unit normalized time")
    inter_entity_min_distance: float = Field(2.0, gt=0.0)
    seed: int = 0

    @field_validator("entities_per_video", "tracklets_per_entity", "tracklet_length", "gap_length")
    @classmethod
    def check_range(cls, v):
        lo, hi = v
        if lo < 1 or hi < lo:
            raise ValueError(f"range {v} must satisfy 1 <= low <= high")
        return v

    @field_validator("frame_size")
    @classmethod
    def check_frame_size(cls, v):
        if min(v) <= 0:
            raise ValueError("frame size must be positive")
        return v

    @property
    def total_videos(self) -> int:
        return self.n_train_videos + self.n_videos


@dataclass
class VideoScenario:
    video_id: str
    split: str
    video_length: int
    frame_size: Tuple[float, float]
    entities: List[str]
    records: List[DetectionRecord] = field(default_factory=list)


@dataclass
class Scenario:
    """Generated detections with their ground truth."""

    config: ScenarioConfig
    videos: List[VideoScenario]
    tracklets: Dict[str, Dict[str, str]]

    @property
    def records(self) -> List[DetectionRecord]:
        return [r for video in self.videos for r in video.records]

    def truth_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.config.model_dump(mode="json"),
            "videos": {
                v.video_id: {"video_length": v.video_length, "frame_size": list(v.frame_size),
                             "split": v.split, "entities": v.entities}
                for v in self.videos
            },
            "tracklets": self.tracklets,
        }


def _draw_range(rng: np.random.Generator, bounds: Tuple[int, int]) -> int:
    return int(rng.integers(bounds[0], bounds[1] + 1))


def place_centroids(n: int, dim: int, min_distance: float, rng: np.random.Generator) -> np.ndarray:
    """Draw n N(0, I) centroids with pairwise distance >= min_distance.

    Raises:
        ScenarioError: If a centroid cannot be placed by rejection sampling
    """
    centroids: List[np.ndarray] = []
    for _ in range(n):
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            candidate = rng.standard_normal(dim)
            if all(np.linalg.norm(candidate - c) >= min_distance for c in centroids):
                centroids.append(candidate)
                break
        else:
            raise ScenarioError(
                f"cannot place {n} centroids {min_distance} apart in {dim} dimensions; "
                f"use a larger feature_dim or a smaller inter_entity_min_distance",
                feature_dim=dim, inter_entity_min_distance=min_distance)
    return np.array(centroids)


def _box_path(length: int, frame_size: Tuple[float, float], rng: np.random.Generator) -> List[Tuple[float, ...]]:
    """A box drifting a few pixels per frame, kept inside the frame."""
    width, height = frame_size
    w = float(rng.uniform(0.1, 0.25) * width)
    h = float(rng.uniform(0.1, 0.25) * height)
    cx = rng.uniform(w / 2, width - w / 2)
    cy = rng.uniform(h / 2, height - h / 2)
    vx, vy = rng.uniform(-2.0, 2.0, 2)
    boxes = []
    for _ in range(length):
        cx = float(np.clip(cx + vx, w / 2, width - w / 2))
        cy = float(np.clip(cy + vy, h / 2, height - h / 2))
        boxes.append((cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2))
    return boxes


def _layout(n_tracklets: int, segment: Tuple[int, int], cfg: ScenarioConfig,
            rng: np.random.Generator) -> List[Tuple[int, int]]:
    """Place tracklets in order inside one entity's time segment, separated by gaps."""
    lengths = [_draw_range(rng, cfg.tracklet_length) for _ in range(n_tracklets)]
    gaps = [_draw_range(rng, cfg.gap_length) for _ in range(n_tracklets - 1)]
    total = sum(lengths) + sum(gaps)
    lo, hi = segment
    if total > hi - lo:
        raise ScenarioError(f"video_length {cfg.video_length} is too short for {n_tracklets} tracklets "
                            f"of up to {cfg.tracklet_length[1]} frames per entity")
    start = lo + int(rng.integers(0, hi - lo - total + 1))
    spans = []
    for i, length in enumerate(lengths):
        spans.append((start, start + length))
        start += length + (gaps[i] if i < len(gaps) else 0)
    return spans


def generate_video(index: int, cfg: ScenarioConfig, seed: np.random.SeedSequence) -> VideoScenario:
    """Generate one video from its own seed sequence."""
    rng = np.random.default_rng(seed)
    split = "train" if index < cfg.n_train_videos else "eval"
    video_id = f"{split}{index if split == 'train' else index - cfg.n_train_videos:03d}"

    n_entities = _draw_range(rng, cfg.entities_per_video)
    centroids = place_centroids(n_entities, cfg.feature_dim, cfg.inter_entity_min_distance, rng)
    directions = rng.standard_normal((n_entities, cfg.feature_dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)

    bounds = np.linspace(0, cfg.video_length, n_entities + 1).astype(int)
    order = rng.permutation(n_entities)

    video = VideoScenario(video_id, split, cfg.video_length, cfg.frame_size,
                          [f"{video_id}-p{k}" for k in range(n_entities)])
    for k, entity_id in enumerate(video.entities):
        slot = order[k]
        segment = (int(bounds[slot]), int(bounds[slot + 1]))
        for start, stop in _layout(_draw_range(rng, cfg.tracklets_per_entity), segment, cfg, rng):
            frames = np.arange(start, stop)
            t = frames / cfg.video_length
            features = (centroids[k] + cfg.beta * t[:, None] * directions[k]
                        + cfg.sigma * rng.standard_normal((len(frames), cfg.feature_dim)))
            for frame, box, feature in zip(frames, _box_path(len(frames), cfg.frame_size, rng), features):
                video.records.append(DetectionRecord(
                    video_id=video_id, frame_index=int(frame), entity_id=entity_id,
                    bbox=box, feature=tuple(feature.tolist())))
    return video


def generate(cfg: ScenarioConfig, fragment_cfg: Optional[FragmentConfig] = None, jobs: int = 1) -> Scenario:
    """Generate a scenario.

    Every video draws from its own child of ``SeedSequence(cfg.seed)``, so
    the output does not depend on ``jobs``.

    Args:
        cfg: Scenario configuration
        fragment_cfg: Tracklet construction settings used for the truth map
        jobs: Worker threads

    Returns:
        Scenario with detections and the tracklet -> entity map
    """
    fragment_cfg = fragment_cfg or FragmentConfig()
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.total_videos)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        videos = list(executor.map(lambda i: generate_video(i, cfg, seeds[i]), range(cfg.total_videos)))

    tracklets: Dict[str, Dict[str, str]] = {}
    for video in videos:
        built = build_tracklets(video.records, fragment_cfg)
        tracklets[video.video_id] = {t.tracklet_id: t.entity_id for t in built}

    n_entities = sum(len(v.entities) for v in videos)
    logger.info(f"Generated {len(videos)} videos, {n_entities} entities, "
                f"{sum(len(t) for t in tracklets.values())} tracklets")
    return Scenario(config=cfg, videos=videos, tracklets=tracklets)


def write_scenario(scenario: Scenario, out_dir: PathLike) -> List[Path]:
    """Write detections.jsonl and truth.json.

    Returns:
        Written paths
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [write_detections(scenario.records, out_dir / DETECTIONS_FILE),
            write_json(scenario.truth_dict(), out_dir / TRUTH_FILE)]
