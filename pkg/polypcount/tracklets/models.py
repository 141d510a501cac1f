"""Domain types for detections, tracklets and fragments."""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import DataError
from .geometry import BBox, validate_bbox


class FragmentConfig(BaseModel):
    """Tracklet construction and fragmenting settings."""

    model_config = ConfigDict(extra="forbid")

    kappa: int = Field(8, ge=1, description="Fragment length in retained frames")
    sampling_stride: int = Field(4, ge=1, description="Keep one frame every N")
    iou_min: float = Field(0.1, ge=0.0, le=1.0, description="Minimum IoU between consecutive detections")
    psi: float = Field(5.0, ge=1.0, description="Bounding-box enlargement factor")


class DetectionRecord(BaseModel):
    """One bounding-box observation of an entity in a frame."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    video_id: str
    frame_index: int = Field(ge=0)
    entity_id: str
    bbox: Tuple[float, float, float, float]
    feature: Optional[Tuple[float, ...]] = None

    @field_validator("bbox")
    @classmethod
    def check_bbox(cls, v):
        return validate_bbox(v)


class Tracklet(BaseModel):
    """Chained detections of one entity, after subsampling.

    ``start_frame``/``end_frame`` delimit the chained run of consecutive
    frames before subsampling.
    """

    tracklet_id: str
    video_id: str
    entity_id: str
    frames: List[DetectionRecord] = Field(min_length=1)
    start_frame: int
    end_frame: int

    @model_validator(mode="after")
    def check_frames(self):
        indices = [f.frame_index for f in self.frames]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError(f"tracklet {self.tracklet_id}: frames must be strictly increasing")
        if any(f.entity_id != self.entity_id or f.video_id != self.video_id for f in self.frames):
            raise ValueError(f"tracklet {self.tracklet_id}: frames from another entity or video")
        if not (self.start_frame <= indices[0] and indices[-1] <= self.end_frame):
            raise ValueError(f"tracklet {self.tracklet_id}: frames outside the chained range")
        return self

    @property
    def length(self) -> int:
        return len(self.frames)

    @property
    def chain_frames(self) -> range:
        return range(self.start_frame, self.end_frame + 1)


class Fragment(BaseModel):
    """A kappa-frame slice of a tracklet."""

    parent: str
    video_id: str
    entity_id: str
    index: int = Field(ge=0)
    frames: List[DetectionRecord] = Field(min_length=1)
    timestamp: float = Field(ge=0.0, le=1.0)
    features: Optional[List[List[float]]] = None
    crops: List[BBox] = Field(default_factory=list)

    def input_feature(self) -> np.ndarray:
        """Mean of the fragment's frame features.

        Raises:
            DataError: If the detections carried no features
        """
        if not self.features:
            raise DataError(f"fragment {self.parent}#{self.index} has no frame features")
        return np.mean(np.asarray(self.features, dtype=float), axis=0)
