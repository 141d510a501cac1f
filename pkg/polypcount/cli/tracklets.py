"""Tracklets command implementation."""

from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, List, Mapping

import click

from ..dataset import load_dataset
from ..manifest import RunOutput
from ..serialization import write_json
from ..tracklets import Fragment, tracklet_to_dict
from .common import absolute, finish, load_config, runner_config


def run_tracklets(config: Mapping[str, Any], out: Path, data: str, jobs: int = 1) -> RunOutput:
    """Build tracklets and fragments of a data directory and dump them."""
    cfg = runner_config(config)
    dataset = load_dataset(data, cfg.tracklets)
    by_parent: Dict[str, List[Fragment]] = defaultdict(list)
    for frag in dataset.fragments:
        by_parent[frag.parent].append(frag)

    videos: Dict[str, List[Dict]] = defaultdict(list)
    for t in dataset.tracklets:
        videos[t.video_id].append(tracklet_to_dict(t, by_parent.get(t.tracklet_id, [])))
    path = write_json({"videos": dict(sorted(videos.items())), "skipped": dataset.skipped},
                      Path(out) / "tracklets.json")
    return RunOutput([path], {
        "tracklets": len(dataset.tracklets),
        "fragments": len(dataset.fragments),
        "skipped": len(dataset.skipped),
    })


@click.command()
@click.option('--data', '-d', required=True, help='Data directory with detections.jsonl and truth.json')
@click.option('--out', '-o', required=True, type=click.Path(file_okay=False), help='Output directory')
@click.option('--kappa', type=int, help='Fragment length in retained frames')
@click.option('--stride', 'sampling_stride', type=int, help='Keep one frame every N')
@click.option('--iou-min', type=float, help='Minimum IoU between consecutive detections')
@click.option('--psi', type=float, help='Bounding-box enlargement factor')
@click.pass_context
def tracklets(ctx, data, out, kappa, sampling_stride, iou_min, psi):
    """Build tracklets and fragments and write them as JSON."""
    config = load_config(ctx, {
        "tracklets.kappa": kappa,
        "tracklets.sampling_stride": sampling_stride,
        "tracklets.iou_min": iou_min,
        "tracklets.psi": psi,
    })
    params = {"data": absolute(data)}
    output = run_tracklets(config.results_dict(), Path(out), jobs=config.jobs, **params)
    finish("tracklets", config, out, output, params, inputs=[data])
