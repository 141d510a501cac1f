"""Bounding-box geometry: validation, IoU and context enlargement."""

import math
from typing import Optional, Sequence, Tuple

from ..errors import InvalidDetectionError


BBox = Tuple[float, float, float, float]


def validate_bbox(box: Sequence[float]) -> BBox:
    """Check that a box is (x_min, y_min, x_max, y_max) with positive area.

    Args:
        box: Four coordinates in pixels

    Returns:
        The box as a float tuple

    Raises:
        InvalidDetectionError: If the box is malformed or has zero area
    """
    if len(box) != 4:
        raise InvalidDetectionError(f"bbox must have 4 coordinates, got {len(box)}")
    x_min, y_min, x_max, y_max = (float(v) for v in box)
    if not all(math.isfinite(v) for v in (x_min, y_min, x_max, y_max)):
        raise InvalidDetectionError(f"bbox has non-finite coordinates: {tuple(box)}")
    if not (x_min < x_max and y_min < y_max):
        raise InvalidDetectionError(f"degenerate bbox {tuple(box)}: need x_min < x_max and y_min < y_max")
    return x_min, y_min, x_max, y_max


def box_area(box: Sequence[float]) -> float:
    return (box[2] - box[0]) * (box[3] - box[1])


def iou(a: Sequence[float], b: Sequence[float]) -> float:
    """Intersection over union of two boxes.

    Args:
        a: First box
        b: Second box

    Returns:
        IoU in [0, 1]; 0 when the boxes are disjoint
    """
    a = validate_bbox(a)
    b = validate_bbox(b)

    x1 = max(a[0], b[0])
    y1 = max(a[1], b[1])
    x2 = min(a[2], b[2])
    y2 = min(a[3], b[3])
    intersection = max(0.0, x2 - x1) * max(0.0, y2 - y1)
    union = box_area(a) + box_area(b) - intersection
    return intersection / union


def diagonal(box: Sequence[float]) -> float:
    return math.hypot(box[2] - box[0], box[3] - box[1])


def enlarge_bbox(box: Sequence[float], psi: float,
                 frame_bounds: Optional[Tuple[float, float]] = None) -> BBox:
    """Scale a box about its center so its diagonal grows by ``psi``.

    Both sides scale by ``psi``, which keeps the aspect ratio and makes the
    diagonal exactly ``psi`` times the original before clamping.

    Args:
        box: Box to enlarge
        psi: Enlargement factor, at least 1
        frame_bounds: Optional (width, height) to clamp the result to

    Returns:
        Enlarged (and possibly clamped) box
    """
    x_min, y_min, x_max, y_max = validate_bbox(box)
    if psi < 1:
        raise ValueError(f"psi must be >= 1, got {psi}")

    cx = (x_min + x_max) / 2.0
    cy = (y_min + y_max) / 2.0
    half_w = (x_max - x_min) * psi / 2.0
    half_h = (y_max - y_min) * psi / 2.0
    enlarged = (cx - half_w, cy - half_h, cx + half_w, cy + half_h)

    if frame_bounds is None:
        return enlarged

    width, height = frame_bounds
    return (
        max(0.0, enlarged[0]),
        max(0.0, enlarged[1]),
        min(float(width), enlarged[2]),
        min(float(height), enlarged[3]),
    )
