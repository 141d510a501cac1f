"""Detection JSON-lines reader and writer."""

import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Set, Tuple

from pydantic import ValidationError

from ..errors import DataError, InvalidDetectionError
from ..serialization import PathLike, to_jsonable
from .models import DetectionRecord, Fragment, Tracklet


logger = logging.getLogger(__name__)


def read_detections(path: PathLike) -> List[DetectionRecord]:
    """Read detection records, one JSON object per line.

    Blank lines are ignored. Keys: video_id, frame_index, entity_id,
    bbox [x_min, y_min, x_max, y_max], optional feature [floats].

    Args:
        path: JSON-lines file

    Returns:
        Records in file order

    Raises:
        DataError: On a missing file, malformed line or duplicate frame;
            the error carries the path and 1-based line number
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"detection file not found: {path}", path=str(path))

    records: List[DetectionRecord] = []
    seen: Set[Tuple[str, str, int]] = set()
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = DetectionRecord.model_validate(json.loads(line))
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: invalid JSON: {e.msg}", path=str(path), line=lineno)
            except InvalidDetectionError as e:
                raise InvalidDetectionError(f"{path}:{lineno}: {e.message}", path=str(path), line=lineno)
            except ValidationError as e:
                first = e.errors()[0]
                where = ".".join(str(p) for p in first["loc"])
                raise DataError(f"{path}:{lineno}: {where}: {first['msg']}", path=str(path), line=lineno)

            key = (record.video_id, record.entity_id, record.frame_index)
            if key in seen:
                raise DataError(f"{path}:{lineno}: duplicate frame {record.frame_index} "
                                f"for entity {record.entity_id!r} in video {record.video_id!r}",
                                path=str(path), line=lineno)
            seen.add(key)
            records.append(record)

    logger.info(f"Read {len(records)} detections from {path}")
    return records


def record_to_dict(record: DetectionRecord) -> Dict:
    data = {
        "video_id": record.video_id,
        "frame_index": record.frame_index,
        "entity_id": record.entity_id,
        "bbox": list(record.bbox),
    }
    if record.feature is not None:
        data["feature"] = list(record.feature)
    return data


def write_detections(records: Iterable[DetectionRecord], path: PathLike) -> Path:
    """Write records in the JSON-lines detection format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for record in records:
            f.write(json.dumps(to_jsonable(record_to_dict(record)), allow_nan=False))
            f.write("\n")
    return path


def tracklet_to_dict(tracklet: Tracklet, fragments: List[Fragment]) -> Dict:
    """JSON form of a tracklet and its fragments (features omitted)."""
    return {
        "tracklet_id": tracklet.tracklet_id,
        "video_id": tracklet.video_id,
        "entity_id": tracklet.entity_id,
        "length": tracklet.length,
        "start_frame": tracklet.start_frame,
        "end_frame": tracklet.end_frame,
        "frames": [f.frame_index for f in tracklet.frames],
        "fragments": [
            {
                "index": frag.index,
                "frames": [f.frame_index for f in frag.frames],
                "timestamp": frag.timestamp,
                "crops": [list(c) for c in frag.crops],
            }
            for frag in fragments
        ],
    }
