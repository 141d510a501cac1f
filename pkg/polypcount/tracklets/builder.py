"""Tracklet construction and fragmenting."""

import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..errors import DataError
from .geometry import enlarge_bbox, iou
from .models import DetectionRecord, Fragment, FragmentConfig, Tracklet


logger = logging.getLogger(__name__)


def group_streams(records: Iterable[DetectionRecord]) -> Dict[Tuple[str, str], List[DetectionRecord]]:
    """Group detections by (video_id, entity_id), each stream sorted by frame."""
    streams: Dict[Tuple[str, str], List[DetectionRecord]] = defaultdict(list)
    for record in records:
        streams[(record.video_id, record.entity_id)].append(record)
    return {key: sorted(stream, key=lambda r: r.frame_index) for key, stream in sorted(streams.items())}


def chain_stream(stream: Sequence[DetectionRecord], iou_min: float) -> List[List[DetectionRecord]]:
    """Split one entity stream into runs of consecutive, IoU-chained detections.

    Args:
        stream: Detections of one entity, sorted by frame index
        iou_min: Minimum IoU between consecutive detections

    Returns:
        List of chains, in frame order
    """
    chains: List[List[DetectionRecord]] = []
    for record in stream:
        if chains:
            prev = chains[-1][-1]
            if record.frame_index == prev.frame_index + 1 and iou(prev.bbox, record.bbox) >= iou_min:
                chains[-1].append(record)
                continue
        chains.append([record])
    return chains


def build_tracklets(records: Iterable[DetectionRecord], cfg: FragmentConfig) -> List[Tracklet]:
    """Build subsampled tracklets from detection records.

    Chaining runs on the original consecutive frames; subsampling keeps every
    ``sampling_stride``-th frame of each chain, starting with the first.

    Args:
        records: Detection records, in any order
        cfg: Fragment configuration

    Returns:
        Tracklets ordered by video, entity and start frame
    """
    tracklets: List[Tracklet] = []
    for (video_id, entity_id), stream in group_streams(records).items():
        for k, chain in enumerate(chain_stream(stream, cfg.iou_min)):
            tracklets.append(Tracklet(
                tracklet_id=f"{video_id}/{entity_id}/{k:03d}",
                video_id=video_id,
                entity_id=entity_id,
                frames=chain[::cfg.sampling_stride],
                start_frame=chain[0].frame_index,
                end_frame=chain[-1].frame_index,
            ))

    logger.debug(f"Built {len(tracklets)} tracklets")
    return tracklets


def fragment_tracklet(tracklet: Tracklet, cfg: FragmentConfig, video_length: int,
                      frame_size: Optional[Tuple[float, float]] = None) -> List[Fragment]:
    """Cut a tracklet into complete kappa-frame fragments.

    The trailing remainder of fewer than kappa frames is dropped. The
    timestamp of a fragment is its middle frame index over the video length.

    Args:
        tracklet: Tracklet to fragment
        cfg: Fragment configuration
        video_length: Video length in frames
        frame_size: Optional (width, height) used to clamp enlarged crops

    Returns:
        Fragments in order; empty when the tracklet is shorter than kappa
    """
    if video_length <= 0:
        raise ValueError(f"video_length must be positive, got {video_length}")

    kappa = cfg.kappa
    n_fragments = tracklet.length // kappa
    if n_fragments == 0:
        logger.debug(f"Skipping tracklet {tracklet.tracklet_id}: {tracklet.length} < kappa={kappa} frames")
        return []

    fragments = []
    for i in range(n_fragments):
        frames = tracklet.frames[i * kappa:i * kappa + kappa]
        middle = frames[kappa // 2].frame_index
        features = None
        if all(f.feature is not None for f in frames):
            features = [list(f.feature) for f in frames]
        fragments.append(Fragment(
            parent=tracklet.tracklet_id,
            video_id=tracklet.video_id,
            entity_id=tracklet.entity_id,
            index=i,
            frames=frames,
            timestamp=min(1.0, middle / video_length),
            features=features,
            crops=[enlarge_bbox(f.bbox, cfg.psi, frame_size) for f in frames],
        ))
    return fragments


def fragment_tracklets(tracklets: Iterable[Tracklet], cfg: FragmentConfig,
                       video_lengths: Mapping[str, int],
                       frame_sizes: Optional[Mapping[str, Tuple[float, float]]] = None
                       ) -> Tuple[List[Fragment], List[str]]:
    """Fragment many tracklets.

    Returns:
        Tuple of (fragments, ids of skipped tracklets)
    """
    fragments: List[Fragment] = []
    skipped: List[str] = []
    frame_sizes = frame_sizes or {}
    for tracklet in tracklets:
        pieces = fragment_tracklet(tracklet, cfg, video_lengths[tracklet.video_id],
                                   frame_sizes.get(tracklet.video_id))
        if pieces:
            fragments.extend(pieces)
        else:
            skipped.append(tracklet.tracklet_id)
    if skipped:
        logger.info(f"{len(skipped)} tracklets shorter than kappa={cfg.kappa} were skipped")
    return fragments, skipped


def tracklet_position(tracklet: Tracklet, video_length: int) -> float:
    """Midpoint of the tracklet's chained range, normalized by video length."""
    midpoint = (tracklet.start_frame + tracklet.end_frame) / 2.0
    return min(1.0, max(0.0, midpoint / video_length))


def entity_spans(tracklets: Iterable[Tracklet], video_lengths: Mapping[str, int]) -> Dict[str, float]:
    """Normalized span of every entity across all its tracklets.

    Returns:
        Map entity_id -> (last frame - first frame + 1) / video length

    Raises:
        DataError: If one entity id appears in two videos
    """
    bounds: Dict[str, List[int]] = {}
    lengths: Dict[str, int] = {}
    videos: Dict[str, str] = {}
    for t in tracklets:
        if videos.setdefault(t.entity_id, t.video_id) != t.video_id:
            raise DataError(f"entity id {t.entity_id!r} appears in videos "
                            f"{videos[t.entity_id]!r} and {t.video_id!r}; entity ids must be unique")
        lo_hi = bounds.setdefault(t.entity_id, [t.start_frame, t.end_frame])
        lo_hi[0] = min(lo_hi[0], t.start_frame)
        lo_hi[1] = max(lo_hi[1], t.end_frame)
        lengths[t.entity_id] = video_lengths[t.video_id]
    return {
        entity: (hi - lo + 1) / lengths[entity]
        for entity, (lo, hi) in sorted(bounds.items())
    }
