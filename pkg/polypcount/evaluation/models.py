"""Evaluation settings, ground truth and per-video evaluation inputs."""

from dataclasses import dataclass, field
from typing import Dict, List, Literal, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..clustering import TrackletDescriptor, visual_similarity
from ..errors import DataError
from .grids import GridSpec


class EvaluationConfig(BaseModel):
    """Hyperparameter selection settings."""

    model_config = ConfigDict(extra="forbid")

    rho: float = Field(0.05, ge=0.0, le=1.0, description="Target false-positive rate")
    metric: Literal["pair", "merge"] = "pair"
    selection: Literal["closest", "constrained"] = "closest"
    grid: GridSpec = Field(default_factory=GridSpec)


class GroundTruth(BaseModel):
    """Per video, the true entity of every tracklet."""

    videos: Dict[str, Dict[str, str]]

    def entity_set(self, video_id: str) -> List[str]:
        return sorted(set(self.videos.get(video_id, {}).values()))

    def entities_for(self, video_id: str, tracklet_ids: Sequence[str]) -> List[str]:
        """True entities of ``tracklet_ids``, in order.

        Raises:
            DataError: If a tracklet is missing from the ground truth
        """
        mapping = self.videos.get(video_id)
        if mapping is None:
            raise DataError(f"video {video_id!r} has no ground truth")
        missing = [t for t in tracklet_ids if t not in mapping]
        if missing:
            raise DataError(f"video {video_id!r}: {len(missing)} tracklets missing from ground truth, "
                            f"first {missing[0]!r}")
        return [mapping[t] for t in tracklet_ids]


@dataclass
class EvaluationVideo:
    """Descriptors of one video's tracklets with their true entities."""

    video_id: str
    descriptors: List[TrackletDescriptor]
    entities: List[str]
    _visual: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.descriptors:
            raise DataError(f"video {self.video_id!r} has no tracklets to cluster")
        if len(self.entities) != len(self.descriptors):
            raise DataError(f"video {self.video_id!r}: ground truth does not cover every tracklet")

    @classmethod
    def from_truth(cls, video_id: str, descriptors: Sequence[TrackletDescriptor],
                   truth: GroundTruth) -> "EvaluationVideo":
        descriptors = list(descriptors)
        return cls(video_id, descriptors, truth.entities_for(video_id, [d.tracklet_id for d in descriptors]))

    @property
    def tracklet_ids(self) -> List[str]:
        return [d.tracklet_id for d in self.descriptors]

    @property
    def positions(self) -> np.ndarray:
        return np.array([d.position for d in self.descriptors])

    @property
    def visual(self) -> np.ndarray:
        if self._visual is None:
            self._visual = visual_similarity(self.descriptors)
        return self._visual


def group_descriptors(descriptors: Mapping[str, Sequence[TrackletDescriptor]],
                      truth: GroundTruth) -> List[EvaluationVideo]:
    """EvaluationVideos in sorted video order."""
    return [EvaluationVideo.from_truth(video_id, descriptors[video_id], truth)
            for video_id in sorted(descriptors)]
