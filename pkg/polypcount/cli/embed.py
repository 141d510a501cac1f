"""Embed command implementation."""

from pathlib import Path
from typing import Any, Mapping, Optional

import click

from ..dataset import embeddings_to_dict, load_dataset
from ..manifest import RunOutput
from ..serialization import write_json
from .common import absolute, finish, load_config, resolve_head, runner_config, split_option


EMBEDDINGS_FILE = "embeddings.json"


def run_embed(config: Mapping[str, Any], out: Path, data: str, checkpoint: Optional[str] = None,
              split: Optional[str] = "eval", jobs: int = 1) -> RunOutput:
    """Write tracklet embeddings and positions of the ``split`` videos."""
    cfg = runner_config(config)
    descriptors = load_dataset(data, cfg.tracklets).descriptors(resolve_head(checkpoint), split)
    path = write_json(embeddings_to_dict(descriptors), Path(out) / EMBEDDINGS_FILE)
    return RunOutput([path], {
        "videos": len(descriptors),
        "tracklets": sum(len(d) for d in descriptors.values()),
        "head": "checkpoint" if checkpoint else "identity",
    })


@click.command()
@click.option('--data', '-d', required=True, help='Data directory with detections.jsonl and truth.json')
@click.option('--checkpoint', type=click.Path(dir_okay=False), help='Trained head; identity when omitted')
@click.option('--out', '-o', required=True, type=click.Path(file_okay=False), help='Output directory')
@click.option('--split', default='eval', type=click.Choice(['train', 'eval', 'all']), help='Videos to embed')
@click.option('--kappa', type=int, help='Fragment length in retained frames')
@click.option('--stride', 'sampling_stride', type=int, help='Keep one frame every N')
@click.option('--iou-min', type=float, help='Minimum IoU between consecutive detections')
@click.pass_context
def embed(ctx, data, checkpoint, out, split, kappa, sampling_stride, iou_min):
    """Embed tracklets: normalized mean of their fragment embeddings."""
    config = load_config(ctx, {
        "tracklets.kappa": kappa,
        "tracklets.sampling_stride": sampling_stride,
        "tracklets.iou_min": iou_min,
    })
    params = {"data": absolute(data), "checkpoint": absolute(checkpoint), "split": split_option(split)}
    output = run_embed(config.results_dict(), Path(out), jobs=config.jobs, **params)
    finish("embed", config, out, output, params, inputs=[data, checkpoint])
