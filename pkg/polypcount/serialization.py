"""JSON and CSV helpers shared by every artifact writer.

Artifacts are written with a fixed layout (2-space indent, trailing
newline) so that identical content always produces identical bytes.
Floats use Python's shortest round-trip representation.
"""

import csv
import json
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

import numpy as np

from .errors import DataError


PathLike = Union[str, Path]


def to_jsonable(obj: Any) -> Any:
    """Convert numpy values and containers into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_json(obj: Any, path: PathLike) -> Path:
    """Write an artifact as JSON.

    Args:
        obj: JSON-serializable object (numpy values allowed)
        path: Output file

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(dumps(obj))
    return path


def read_json(path: PathLike) -> Any:
    """Load a JSON file.

    Raises:
        DataError: If the file is missing or not valid JSON
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}", path=str(path))
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DataError(f"invalid JSON in {path}: {e.msg}", path=str(path), line=e.lineno)


def write_csv(rows: Iterable[Sequence[Any]], header: List[str], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([to_jsonable(v) for v in row])
    return path
