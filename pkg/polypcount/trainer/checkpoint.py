"""JSON checkpoints of embedding heads."""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..errors import DataError
from ..serialization import PathLike, read_json, write_json
from .head import DenseLayer, EmbeddingHead


logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "polypcount-head"
CHECKPOINT_VERSION = 1


def head_to_dict(head: EmbeddingHead) -> Dict[str, Any]:
    """Shapes plus row-major parameter arrays."""
    return {
        "activation": head.activation,
        "layers": [
            {"shape": list(layer.shape), "W": layer.W.ravel().tolist(), "b": layer.b.tolist()}
            for layer in head.layers
        ],
    }


def head_from_dict(data: Dict[str, Any]) -> EmbeddingHead:
    layers = []
    for spec in data["layers"]:
        rows, cols = spec["shape"]
        layers.append(DenseLayer(np.array(spec["W"], dtype=float).reshape(rows, cols),
                                 np.array(spec["b"], dtype=float)))
    return EmbeddingHead(layers, data.get("activation", "tanh"))


def save_checkpoint(head: EmbeddingHead, path: PathLike, metadata: Optional[Dict[str, Any]] = None):
    """Write a head checkpoint.

    Args:
        head: Head to save
        path: Output JSON file
        metadata: Extra entries (configs, seed, loss curves) stored alongside
    """
    payload = {"format": CHECKPOINT_FORMAT, "version": CHECKPOINT_VERSION, "head": head_to_dict(head)}
    payload.update(metadata or {})
    return write_json(payload, path)


def load_checkpoint(path: PathLike) -> Tuple[EmbeddingHead, Dict[str, Any]]:
    """Read a head checkpoint.

    Returns:
        Tuple of (head, remaining checkpoint entries)

    Raises:
        DataError: If the file is missing, not a checkpoint or has bad shapes
    """
    data = read_json(path)
    if not isinstance(data, dict) or data.get("format") != CHECKPOINT_FORMAT:
        raise DataError(f"{path} is not a {CHECKPOINT_FORMAT} checkpoint", path=str(path))
    try:
        head = head_from_dict(data["head"])
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"malformed checkpoint {path}: {e}", path=str(path))
    if not all(np.all(np.isfinite(p)) for p in head.parameters()):
        raise DataError(f"checkpoint {path} holds non-finite parameters", path=str(path))
    logger.debug(f"Loaded head {[layer.shape for layer in head.layers]} from {path}")
    metadata = {k: v for k, v in data.items() if k not in ("format", "version", "head")}
    return head, metadata
