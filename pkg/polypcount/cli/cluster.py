"""Cluster command implementation."""

from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import click

from ..clustering import ALGORITHMS, cluster_tracklets
from ..dataset import load_embeddings, load_truth
from ..evaluation import EvaluationVideo, score_clustering
from ..manifest import RunOutput
from ..serialization import write_json
from .common import absolute, finish, load_config, runner_config


def clustering_overrides(algorithm, threshold, preference, gamma, alpha, damping, max_iterations,
                         convergence_window) -> Dict[str, Any]:
    return {
        "clustering.algorithm": algorithm,
        "clustering.threshold": threshold,
        "clustering.preference": preference,
        "clustering.gamma": gamma,
        "clustering.alpha": alpha,
        "clustering.damping": damping,
        "clustering.max_iterations": max_iterations,
        "clustering.convergence_window": convergence_window,
    }


def clustering_options(f):
    """Flags for every ClusteringConfig field."""
    options = [
        click.option('--algorithm', type=click.Choice(ALGORITHMS), help='Clustering algorithm'),
        click.option('--threshold', type=float, help='Association threshold theta'),
        click.option('--preference', type=float, help='AP preference'),
        click.option('--gamma', type=float, help='Temporal penalty factor'),
        click.option('--alpha', type=float, help='Weight of visual similarity'),
        click.option('--damping', type=float, help='AP damping in [0.5, 1)'),
        click.option('--max-iterations', type=int, help='AP iteration limit'),
        click.option('--convergence-window', type=int, help='AP convergence window'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def run_cluster(config: Mapping[str, Any], out: Path, embeddings: str, truth: Optional[str] = None,
                jobs: int = 1) -> RunOutput:
    """Cluster every video of an embeddings file with the configured algorithm."""
    cfg = runner_config(config)
    descriptors = load_embeddings(embeddings)
    ground_truth = load_truth(truth) if truth else None

    videos = {}
    for video_id in sorted(descriptors):
        result = cluster_tracklets(descriptors[video_id], cfg.clustering)
        videos[video_id] = result.to_dict()
        if ground_truth is not None:
            video = EvaluationVideo.from_truth(video_id, descriptors[video_id], ground_truth)
            score = score_clustering(video, result, cfg.evaluation.metric)
            videos[video_id].update({"fr": score.fr, "fpr": score.fpr, "n_entities": score.n_entities})

    path = write_json({"config": cfg.clustering.model_dump(), "videos": videos}, Path(out) / "clusters.json")
    return RunOutput([path], {
        "algorithm": cfg.clustering.algorithm,
        "videos": {vid: {k: v for k, v in r.items() if k not in ("labels", "exemplars")}
                   for vid, r in videos.items()},
    })


@click.command()
@click.option('--embeddings', '-e', required=True, help='Embeddings JSON written by embed')
@click.option('--truth', help='truth.json; adds FR/FPR per video')
@click.option('--out', '-o', required=True, type=click.Path(file_okay=False), help='Output directory')
@clustering_options
@click.pass_context
def cluster(ctx, embeddings, truth, out, algorithm, threshold, preference, gamma, alpha, damping,
            max_iterations, convergence_window):
    """Cluster tracklets into entities."""
    config = load_config(ctx, clustering_overrides(algorithm, threshold, preference, gamma, alpha, damping,
                                                   max_iterations, convergence_window))
    params = {"embeddings": absolute(embeddings), "truth": absolute(truth)}
    output = run_cluster(config.results_dict(), Path(out), jobs=config.jobs, **params)
    finish("cluster", config, out, output, params, inputs=[embeddings, truth])
