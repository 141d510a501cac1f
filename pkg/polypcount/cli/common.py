"""Helpers shared by the subcommands: config resolution, output and manifests."""

import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import click

from ..config import RunConfig, config_from_dict, get_config
from ..evaluation import EvaluationVideo, group_descriptors, parse_grid
from ..dataset import load_dataset, load_embeddings, load_truth
from ..manifest import RunOutput, write_manifest
from ..serialization import dumps
from ..trainer import EmbeddingHead, load_checkpoint


logger = logging.getLogger(__name__)


def emit(payload: Any) -> None:
    """Print a result JSON on stdout."""
    click.echo(dumps(payload), nl=False)


def load_config(ctx: click.Context, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Resolve the run configuration from the global options and command flags."""
    overrides = dict(overrides or {})
    if ctx.obj.get('jobs') is not None:
        overrides['jobs'] = ctx.obj['jobs']
    return get_config(ctx.obj.get('config_file'), overrides)


def absolute(path: Optional[str]) -> Optional[str]:
    return str(Path(path).resolve()) if path is not None else None


def grid_overrides(threshold_grid: Optional[str], preference_grid: Optional[str],
                   gamma_grid: Optional[str], alpha_grid: Optional[str]) -> Dict[str, Any]:
    grids = {"threshold": threshold_grid, "preference": preference_grid,
             "gamma": gamma_grid, "alpha": alpha_grid}
    return {f"evaluation.grid.{name}": parse_grid(text) for name, text in grids.items() if text is not None}


def finish(command: str, config: RunConfig, out: str, output: RunOutput, params: Mapping[str, Any],
           inputs: Sequence[Optional[str]] = (), seed_key: Optional[str] = None) -> None:
    """Write the run manifest and print the run summary."""
    manifest = write_manifest(out, command, params, config.results_dict(), output.artifacts, inputs, seed_key)
    summary = dict(output.summary)
    summary.update({"out": str(Path(out).resolve()), "manifest": str(manifest.resolve()),
                    "artifacts": sorted(str(p.relative_to(out)) for p in output.artifacts)})
    emit(summary)


def resolve_head(checkpoint: Optional[str]) -> Optional[EmbeddingHead]:
    if checkpoint is None:
        return None
    head, _ = load_checkpoint(checkpoint)
    return head


def evaluation_inputs(cfg: RunConfig, data: Optional[str], checkpoint: Optional[str],
                      embeddings: Optional[str], truth: Optional[str], split: Optional[str]) -> List[EvaluationVideo]:
    """Evaluation videos from either ``--embeddings`` + ``--truth`` or ``--data`` [+ ``--checkpoint``].

    Without a checkpoint the normalized mean fragment feature is the embedding.
    """
    if embeddings is not None:
        if truth is None:
            raise click.UsageError("--embeddings needs --truth")
        return group_descriptors(load_embeddings(embeddings), load_truth(truth))
    if data is None:
        raise click.UsageError("either --data or --embeddings is required")
    dataset = load_dataset(data, cfg.tracklets)
    return dataset.evaluation_videos(resolve_head(checkpoint), split)


def split_option(value: str) -> Optional[str]:
    return None if value == "all" else value


def runner_config(config: Mapping[str, Any]) -> RunConfig:
    return config_from_dict(config)
