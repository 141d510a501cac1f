"""Run manifests: what produced a set of artifacts, and a check that it still does."""

import hashlib
import logging
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

from . import __version__
from .errors import DataError, ReproductionMismatch
from .serialization import PathLike, read_json, write_json


logger = logging.getLogger(__name__)

TOOL_NAME = "polypcount"
MANIFEST_FILE = "manifest.json"


@dataclass
class RunOutput:
    """Files a runner wrote plus the summary printed for the user."""

    artifacts: List[Path]
    summary: Dict[str, Any] = field(default_factory=dict)


Runner = Callable[..., RunOutput]


def sha256_file(path: PathLike) -> str:
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _hashes(paths: Sequence[Path], root: Optional[Path] = None) -> Dict[str, str]:
    result = {}
    for path in sorted(Path(p) for p in paths):
        key = str(path.relative_to(root)) if root else str(path.resolve())
        result[key] = sha256_file(path)
    return result


def input_files(paths: Sequence[Optional[PathLike]]) -> List[Path]:
    """Expand input paths (files or data directories) into files."""
    files: List[Path] = []
    for p in paths:
        if p is None:
            continue
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(f for f in p.iterdir() if f.is_file() and f.name != MANIFEST_FILE))
        elif p.is_file():
            files.append(p)
    return files


def write_manifest(out_dir: PathLike, command: str, params: Mapping[str, Any], config: Mapping[str, Any],
                   artifacts: Sequence[Path], inputs: Sequence[Optional[PathLike]] = (),
                   seed_key: Optional[str] = None) -> Path:
    """Record how the artifacts in ``out_dir`` were produced.

    Args:
        out_dir: Run output directory
        command: Subcommand name
        params: Subcommand parameters, paths made absolute
        config: Fully resolved configuration
        artifacts: Files written by the run
        inputs: Input files or directories
        seed_key: Dotted config key holding the run's seed

    Returns:
        Path of manifest.json
    """
    out_dir = Path(out_dir)
    seed = _get_dotted(config, seed_key) if seed_key else None
    manifest = {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": command,
        "params": dict(params),
        "config": dict(config),
        "seed_key": seed_key,
        "seed": seed,
        "inputs": _hashes(input_files(inputs)),
        "artifacts": _hashes(artifacts, out_dir),
    }
    path = write_json(manifest, out_dir / MANIFEST_FILE)
    logger.debug(f"Wrote manifest {path} ({len(artifacts)} artifacts)")
    return path


def _get_dotted(data: Mapping[str, Any], key: str) -> Any:
    for part in key.split("."):
        data = data[part]
    return data


def _set_dotted(data: Dict[str, Any], key: str, value: Any) -> None:
    *parents, last = key.split(".")
    for part in parents:
        data = data[part]
    data[last] = value


def reproduce(manifest_path: PathLike, runners: Mapping[str, Runner]) -> Dict[str, Any]:
    """Re-run a manifest into a temporary directory and compare artifact hashes.

    The manifest's top-level ``seed`` is written back into the config before
    the re-run.

    Args:
        manifest_path: manifest.json of a previous run
        runners: Subcommand name -> runner(config, out, **params)

    Returns:
        Summary with the command and the compared artifacts

    Raises:
        DataError: If the manifest is malformed or names an unknown command
        ReproductionMismatch: If inputs or artifacts differ; the error lists them
    """
    manifest = read_json(manifest_path)
    try:
        command = manifest["command"]
        params = dict(manifest["params"])
        config = manifest["config"]
        expected = manifest["artifacts"]
    except (KeyError, TypeError) as e:
        raise DataError(f"malformed manifest {manifest_path}: missing {e}", path=str(manifest_path))
    if command not in runners:
        raise DataError(f"manifest {manifest_path} names unknown command {command!r}", path=str(manifest_path))
    if manifest.get("seed_key"):
        _set_dotted(config, manifest["seed_key"], manifest.get("seed"))

    changed_inputs = [p for p, digest in manifest.get("inputs", {}).items()
                      if not Path(p).is_file() or sha256_file(p) != digest]

    with tempfile.TemporaryDirectory(prefix="polypcount-reproduce-") as tmp:
        produced = _hashes(runners[command](config, Path(tmp), **params).artifacts, Path(tmp))

    differing = sorted(name for name in set(expected) | set(produced)
                       if expected.get(name) != produced.get(name))
    if differing or changed_inputs:
        raise ReproductionMismatch(
            f"re-running {command} did not reproduce {len(differing)} artifacts",
            path=str(manifest_path), command=command,
            artifacts=[{"artifact": n, "expected": expected.get(n), "actual": produced.get(n)} for n in differing],
            changed_inputs=changed_inputs or None)
    logger.info(f"Reproduced {len(produced)} artifacts of {command}")
    return {"manifest": str(manifest_path), "command": command, "match": True, "artifacts": produced}
