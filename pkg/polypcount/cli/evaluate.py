"""Evaluate, grid-search and loocv command implementations."""

from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import click

from ..evaluation import (
    evaluate_config,
    grid_search as run_grid,
    loocv as run_loocv_report,
    select_hyperparams,
    tuned_parameters,
    write_grid,
    write_report,
)
from ..manifest import RunOutput
from ..serialization import write_json
from .cluster import clustering_options, clustering_overrides
from .common import (
    absolute,
    evaluation_inputs,
    finish,
    grid_overrides,
    load_config,
    runner_config,
    split_option,
)


def input_options(f):
    """Either --data [--checkpoint] or --embeddings --truth."""
    options = [
        click.option('--data', '-d', help='Data directory with detections.jsonl and truth.json'),
        click.option('--checkpoint', type=click.Path(dir_okay=False),
                     help='Trained head for --data; identity embedding when omitted'),
        click.option('--embeddings', '-e', help='Embeddings JSON written by embed'),
        click.option('--truth', help='truth.json for --embeddings'),
        click.option('--split', default='eval', type=click.Choice(['train', 'eval', 'all']),
                     help='Videos of --data to evaluate'),
        click.option('--out', '-o', required=True, type=click.Path(file_okay=False), help='Output directory'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def selection_options(f):
    options = [
        click.option('--rho', type=float, help='Target false-positive rate'),
        click.option('--metric', type=click.Choice(['pair', 'merge']), help='FPR definition'),
        click.option('--selection', type=click.Choice(['closest', 'constrained']), help='Selection policy'),
        click.option('--threshold-grid', help='Threshold grid: a,b,c or start:stop:step'),
        click.option('--preference-grid', help='Preference grid'),
        click.option('--gamma-grid', help='Gamma grid'),
        click.option('--alpha-grid', help='Alpha grid'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _input_params(data, checkpoint, embeddings, truth, split) -> Dict[str, Any]:
    return {"data": absolute(data), "checkpoint": absolute(checkpoint), "embeddings": absolute(embeddings),
            "truth": absolute(truth), "split": split_option(split)}


def _selection_overrides(rho, metric, selection, threshold_grid, preference_grid, gamma_grid, alpha_grid):
    overrides = {"evaluation.rho": rho, "evaluation.metric": metric, "evaluation.selection": selection}
    overrides.update(grid_overrides(threshold_grid, preference_grid, gamma_grid, alpha_grid))
    return overrides


def run_evaluate(config: Mapping[str, Any], out: Path, data: Optional[str] = None, checkpoint: Optional[str] = None,
                 embeddings: Optional[str] = None, truth: Optional[str] = None, split: Optional[str] = "eval",
                 jobs: int = 1) -> RunOutput:
    """Score the configured clustering on every video."""
    cfg = runner_config(config)
    videos = evaluation_inputs(cfg, data, checkpoint, embeddings, truth, split)
    report = evaluate_config(videos, cfg.clustering, cfg.evaluation.metric, jobs)
    return RunOutput(write_report(report, out), report.to_dict())


def run_grid_search(config: Mapping[str, Any], out: Path, data: Optional[str] = None,
                    checkpoint: Optional[str] = None, embeddings: Optional[str] = None, truth: Optional[str] = None,
                    split: Optional[str] = "eval", jobs: int = 1) -> RunOutput:
    """Score every grid configuration of the configured algorithm on every video."""
    cfg = runner_config(config)
    videos = evaluation_inputs(cfg, data, checkpoint, embeddings, truth, split)
    algorithm = cfg.clustering.algorithm
    results = run_grid(videos, algorithm, cfg.evaluation.grid, cfg.clustering, cfg.evaluation.metric, jobs)
    best = select_hyperparams(results, cfg.evaluation.rho, cfg.evaluation.selection)
    summary = {
        "algorithm": algorithm,
        "n_configs": len(results),
        "n_videos": len(videos),
        "selected": {
            "index": best.index,
            "hyperparameters": {name: best.config[name] for name in tuned_parameters(algorithm)},
            "fr": best.mean_fr(),
            "fpr": best.mean_fpr(),
        },
    }
    artifacts = [write_grid(results, out), write_json(summary, Path(out) / "selection.json")]
    return RunOutput(artifacts, summary)


def run_loocv(config: Mapping[str, Any], out: Path, data: Optional[str] = None, checkpoint: Optional[str] = None,
              embeddings: Optional[str] = None, truth: Optional[str] = None, split: Optional[str] = "eval",
              jobs: int = 1) -> RunOutput:
    """Leave-one-video-out cross-validation of the configured algorithm."""
    cfg = runner_config(config)
    videos = evaluation_inputs(cfg, data, checkpoint, embeddings, truth, split)
    algorithm = cfg.clustering.algorithm
    results = run_grid(videos, algorithm, cfg.evaluation.grid, cfg.clustering, cfg.evaluation.metric, jobs)
    report = run_loocv_report(videos, algorithm, cfg.evaluation, cfg.clustering, jobs, results)
    artifacts = write_report(report, out) + [write_grid(results, out)]
    return RunOutput(artifacts, report.to_dict())


@click.command()
@input_options
@clustering_options
@click.option('--metric', type=click.Choice(['pair', 'merge']), help='FPR definition')
@click.pass_context
def evaluate(ctx, data, checkpoint, embeddings, truth, split, out, algorithm, threshold, preference, gamma,
             alpha, damping, max_iterations, convergence_window, metric):
    """Evaluate one fixed clustering configuration (FR, FPR per video)."""
    overrides = clustering_overrides(algorithm, threshold, preference, gamma, alpha, damping,
                                     max_iterations, convergence_window)
    overrides["evaluation.metric"] = metric
    config = load_config(ctx, overrides)
    params = _input_params(data, checkpoint, embeddings, truth, split)
    output = run_evaluate(config.results_dict(), Path(out), jobs=config.jobs, **params)
    finish("evaluate", config, out, output, params, inputs=[data, checkpoint, embeddings, truth])


@click.command('grid-search')
@input_options
@clustering_options
@selection_options
@click.pass_context
def grid_search(ctx, data, checkpoint, embeddings, truth, split, out, algorithm, threshold, preference, gamma,
                alpha, damping, max_iterations, convergence_window, rho, metric, selection, threshold_grid,
                preference_grid, gamma_grid, alpha_grid):
    """Evaluate every configuration of a hyperparameter grid."""
    overrides = clustering_overrides(algorithm, threshold, preference, gamma, alpha, damping,
                                     max_iterations, convergence_window)
    overrides.update(_selection_overrides(rho, metric, selection, threshold_grid, preference_grid,
                                          gamma_grid, alpha_grid))
    config = load_config(ctx, overrides)
    params = _input_params(data, checkpoint, embeddings, truth, split)
    output = run_grid_search(config.results_dict(), Path(out), jobs=config.jobs, **params)
    finish("grid-search", config, out, output, params, inputs=[data, checkpoint, embeddings, truth])


@click.command()
@input_options
@clustering_options
@selection_options
@click.pass_context
def loocv(ctx, data, checkpoint, embeddings, truth, split, out, algorithm, threshold, preference, gamma,
          alpha, damping, max_iterations, convergence_window, rho, metric, selection, threshold_grid,
          preference_grid, gamma_grid, alpha_grid):
    """Leave-one-video-out cross-validation with FPR-targeted selection."""
    overrides = clustering_overrides(algorithm, threshold, preference, gamma, alpha, damping,
                                     max_iterations, convergence_window)
    overrides.update(_selection_overrides(rho, metric, selection, threshold_grid, preference_grid,
                                          gamma_grid, alpha_grid))
    config = load_config(ctx, overrides)
    params = _input_params(data, checkpoint, embeddings, truth, split)
    output = run_loocv(config.results_dict(), Path(out), jobs=config.jobs, **params)
    finish("loocv", config, out, output, params, inputs=[data, checkpoint, embeddings, truth])
