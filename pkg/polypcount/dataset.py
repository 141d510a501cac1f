"""Loading of data directories and embedding files shared by the subcommands.

A data directory holds ``detections.jsonl`` and ``truth.json`` as written
by ``generate``. ``truth.json`` carries the per-video metadata (length,
frame size, split) and the tracklet -> entity map.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .clustering import TrackletDescriptor
from .errors import DataError
from .evaluation import EvaluationVideo, GroundTruth, group_descriptors
from .serialization import PathLike, read_json
from .synth import DETECTIONS_FILE, TRUTH_FILE
from .trainer import EmbeddingHead, TrainingSet, embed_tracklets
from .tracklets import (
    DetectionRecord,
    Fragment,
    FragmentConfig,
    Tracklet,
    build_tracklets,
    entity_spans,
    fragment_tracklets,
    read_detections,
    tracklet_position,
)


logger = logging.getLogger(__name__)


@dataclass
class VideoMeta:
    video_length: int
    frame_size: Optional[Tuple[float, float]] = None
    split: str = "eval"


@dataclass
class DataSet:
    """Detections of a data directory with tracklets, fragments and truth."""

    path: Path
    records: List[DetectionRecord]
    videos: Dict[str, VideoMeta]
    truth: GroundTruth
    tracklets: List[Tracklet]
    fragments: List[Fragment]
    skipped: List[str] = field(default_factory=list)

    @property
    def video_lengths(self) -> Dict[str, int]:
        return {vid: meta.video_length for vid, meta in self.videos.items()}

    def split_videos(self, split: Optional[str]) -> List[str]:
        """Video ids of ``split`` (all videos when None), sorted."""
        return sorted(vid for vid, meta in self.videos.items() if split is None or meta.split == split)

    def training_set(self, split: Optional[str] = "train") -> TrainingSet:
        """Fragments of the ``split`` videos, indexed for batch sampling.

        Raises:
            DataError: If the split has no videos or no fragments
        """
        videos = set(self.split_videos(split))
        if not videos:
            raise DataError(f"{self.path} has no {split!r} videos to train on", path=str(self.path))
        tracklets = [t for t in self.tracklets if t.video_id in videos]
        fragments = [f for f in self.fragments if f.video_id in videos]
        return TrainingSet.from_fragments(fragments, entity_spans(tracklets, self.video_lengths))

    def descriptors(self, head: Optional[EmbeddingHead], split: Optional[str] = "eval"
                    ) -> Dict[str, List[TrackletDescriptor]]:
        """Tracklet descriptors per video; tracklets without fragments are left out.

        Args:
            head: Embedding head; None embeds the normalized mean input feature
            split: Videos to describe (all when None)
        """
        videos = set(self.split_videos(split))
        fragments = [f for f in self.fragments if f.video_id in videos]
        if not fragments:
            raise DataError(f"{self.path} has no fragments in {split!r} videos", path=str(self.path))
        embeddings = embed_tracklets(head, fragments)
        result: Dict[str, List[TrackletDescriptor]] = defaultdict(list)
        for t in self.tracklets:
            if t.tracklet_id in embeddings:
                result[t.video_id].append(TrackletDescriptor(
                    tracklet_id=t.tracklet_id,
                    embedding=embeddings[t.tracklet_id],
                    position=tracklet_position(t, self.videos[t.video_id].video_length),
                ))
        return dict(result)

    def evaluation_videos(self, head: Optional[EmbeddingHead], split: Optional[str] = "eval") -> List[EvaluationVideo]:
        return group_descriptors(self.descriptors(head, split), self.truth)


def _video_meta(truth_path: Path, data: Dict[str, Any]) -> Dict[str, VideoMeta]:
    videos = {}
    for vid, meta in data.get("videos", {}).items():
        try:
            size = meta.get("frame_size")
            videos[vid] = VideoMeta(video_length=int(meta["video_length"]),
                                    frame_size=tuple(size) if size else None,
                                    split=meta.get("split", "eval"))
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"{truth_path}: bad metadata for video {vid!r}: {e}", path=str(truth_path))
        if videos[vid].video_length <= 0:
            raise DataError(f"{truth_path}: video {vid!r} has non-positive length", path=str(truth_path))
    return videos


def load_dataset(data_dir: PathLike, cfg: Optional[FragmentConfig] = None) -> DataSet:
    """Read a data directory and build its tracklets and fragments.

    Raises:
        DataError: On missing files, malformed input, or detections of a
            video without metadata
    """
    cfg = cfg or FragmentConfig()
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise DataError(f"data directory not found: {data_dir}", path=str(data_dir))

    records = read_detections(data_dir / DETECTIONS_FILE)
    truth_path = data_dir / TRUTH_FILE
    truth_data = read_json(truth_path)
    videos = _video_meta(truth_path, truth_data)
    unknown = sorted({r.video_id for r in records} - set(videos))
    if unknown:
        raise DataError(f"{truth_path}: no metadata for video {unknown[0]!r}", path=str(truth_path))

    tracklets = build_tracklets(records, cfg)
    fragments, skipped = fragment_tracklets(
        tracklets, cfg, {v: m.video_length for v, m in videos.items()},
        {v: m.frame_size for v, m in videos.items() if m.frame_size})
    logger.info(f"Loaded {data_dir}: {len(videos)} videos, {len(tracklets)} tracklets, {len(fragments)} fragments")
    return DataSet(path=data_dir, records=records, videos=videos,
                   truth=GroundTruth(videos=truth_data.get("tracklets", {})),
                   tracklets=tracklets, fragments=fragments, skipped=skipped)


def embeddings_to_dict(descriptors: Dict[str, List[TrackletDescriptor]]) -> Dict[str, Any]:
    return {
        "videos": {
            vid: [{"tracklet_id": d.tracklet_id, "position": d.position, "embedding": d.embedding.tolist()}
                  for d in descriptors[vid]]
            for vid in sorted(descriptors)
        }
    }


def load_embeddings(path: PathLike) -> Dict[str, List[TrackletDescriptor]]:
    """Read tracklet descriptors written by ``embed``.

    Raises:
        DataError: If the file is missing or malformed
    """
    data = read_json(path)
    try:
        return {
            vid: [TrackletDescriptor(item["tracklet_id"], item["embedding"], float(item["position"]))
                  for item in items]
            for vid, items in data["videos"].items()
        }
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"malformed embeddings file {path}: {e}", path=str(path))


def load_truth(path: PathLike) -> GroundTruth:
    data = read_json(path)
    if not isinstance(data, dict) or "tracklets" not in data:
        raise DataError(f"{path} has no tracklet -> entity map", path=str(path))
    return GroundTruth(videos=data["tracklets"])
