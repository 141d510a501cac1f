"""Detection ingestion, tracklet construction and fragmenting."""

from .builder import (
    build_tracklets,
    chain_stream,
    entity_spans,
    fragment_tracklet,
    fragment_tracklets,
    group_streams,
    tracklet_position,
)
from .geometry import BBox, diagonal, enlarge_bbox, iou, validate_bbox
from .io import read_detections, record_to_dict, tracklet_to_dict, write_detections
from .models import DetectionRecord, Fragment, FragmentConfig, Tracklet

__all__ = [
    "BBox",
    "DetectionRecord",
    "Fragment",
    "FragmentConfig",
    "Tracklet",
    "build_tracklets",
    "chain_stream",
    "diagonal",
    "enlarge_bbox",
    "entity_spans",
    "fragment_tracklet",
    "fragment_tracklets",
    "group_streams",
    "iou",
    "read_detections",
    "record_to_dict",
    "tracklet_position",
    "tracklet_to_dict",
    "validate_bbox",
    "write_detections",
]
