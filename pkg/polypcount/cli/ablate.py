"""Ablate command implementation."""

import logging
from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple

import click
import numpy as np

from ..dataset import load_dataset
from ..evaluation import loocv
from ..loss import LossMode
from ..manifest import RunOutput
from ..serialization import write_csv, write_json
from ..synth import generate, get_preset, scenario_suite, write_scenario
from ..trainer import TrainerConfig, initialize_head, train
from .common import finish, grid_overrides, load_config, runner_config


logger = logging.getLogger(__name__)

VIEWS_SWEEP: Tuple[Tuple[int, int], ...] = ((2, 28), (4, 14), (7, 8), (14, 3), (28, 2))
ABLATION_HEADER = ["seed", "mode", "algorithm", "views_per_polyp", "polyps_per_batch", "fr", "fpr"]


def _train_and_score(dataset, cfg, trainer_cfg: TrainerConfig, mode: LossMode,
                     algorithms: Sequence[str], jobs: int) -> Dict[str, Tuple[float, float]]:
    training = dataset.training_set("train")
    head = initialize_head(training, trainer_cfg)
    train(training, head, cfg.loss.model_copy(update={"mode": mode}), trainer_cfg)
    videos = dataset.evaluation_videos(head, "eval")
    scores = {}
    for algorithm in algorithms:
        report = loocv(videos, algorithm, cfg.evaluation, cfg.clustering, jobs)
        scores[algorithm] = (report.fr["mean"], report.fpr["mean"])
    return scores


def _orderings(means: Mapping[Tuple[str, str], float]) -> Dict[str, bool]:
    ta = means.get(("temporally_aware", "temporal_ap"))
    sup = means.get(("supervised", "temporal_ap"))
    ss = means.get(("self_supervised", "temporal_ap"))
    ap = means.get(("temporally_aware", "ap"))
    return {
        "temporally_aware <= supervised": ta <= sup,
        "supervised <= self_supervised": sup <= ss,
        "temporal_ap <= ap": ta <= ap,
    }


def run_ablate(config: Mapping[str, Any], out: Path, preset: str, seeds: List[int],
               views_sweep: bool = False, jobs: int = 1) -> RunOutput:
    """Loss modes x clustering algorithms over a seed set, plus the views-per-polyp sweep.

    Every seed generates its own scenario from ``preset`` and trains with
    that seed.
    """
    cfg = runner_config(config)
    out = Path(out)
    artifacts: List[Path] = []
    rows: List[List[Any]] = []
    skipped: List[Dict[str, int]] = []

    for seed in seeds:
        scenario_cfg = get_preset(preset).model_copy(update={"seed": seed})
        data_dir = out / f"data-seed{seed}"
        artifacts.extend(write_scenario(generate(scenario_cfg, cfg.tracklets, jobs), data_dir))
        dataset = load_dataset(data_dir, cfg.tracklets)
        trainer_cfg = cfg.trainer.model_copy(update={"seed": seed})
        k, p = trainer_cfg.views_per_polyp, trainer_cfg.polyps_per_batch

        for mode in LossMode:
            algorithms = ("temporal_ap", "ap") if mode == LossMode.TEMPORALLY_AWARE else ("temporal_ap",)
            logger.info(f"Ablation seed {seed}: {mode.value}")
            for algorithm, (fr, fpr) in _train_and_score(dataset, cfg, trainer_cfg, mode, algorithms, jobs).items():
                rows.append([seed, mode.value, algorithm, k, p, fr, fpr])

        if views_sweep:
            n_entities = len(dataset.training_set("train").by_entity)
            for views, polyps in VIEWS_SWEEP:
                if polyps > n_entities:
                    logger.warning(f"Skipping views sweep ({views}, {polyps}): only {n_entities} training entities")
                    skipped.append({"seed": seed, "views_per_polyp": views, "polyps_per_batch": polyps})
                    continue
                sweep_cfg = TrainerConfig.model_validate({
                    **trainer_cfg.model_dump(), "views_per_polyp": views, "polyps_per_batch": polyps,
                    "batch_size": max(trainer_cfg.batch_size, views * polyps)})
                scores = _train_and_score(dataset, cfg, sweep_cfg, LossMode.TEMPORALLY_AWARE, ("temporal_ap",), jobs)
                fr, fpr = scores["temporal_ap"]
                rows.append([seed, "views_sweep", "temporal_ap", views, polyps, fr, fpr])

    grouped: Dict[Tuple[str, str], List[float]] = defaultdict(list)
    for seed, mode, algorithm, views, polyps, fr, fpr in rows:
        if mode != "views_sweep":
            grouped[(mode, algorithm)].append(fr)
    means = {key: float(np.mean(values)) for key, values in grouped.items()}

    sweep: Dict[str, List[float]] = defaultdict(list)
    for seed, mode, algorithm, views, polyps, fr, fpr in rows:
        if mode == "views_sweep":
            sweep[f"{views}x{polyps}"].append(fr)

    summary = {
        "preset": preset,
        "seeds": seeds,
        "mean_fr": {f"{mode}/{algorithm}": fr for (mode, algorithm), fr in sorted(means.items())},
        "orderings": _orderings(means),
        "views_sweep": {key: float(np.mean(v)) for key, v in sweep.items()},
        "skipped": skipped,
    }
    artifacts.append(write_csv(rows, ABLATION_HEADER, out / "ablation.csv"))
    artifacts.append(write_json(summary, out / "ablation.json"))
    return RunOutput(artifacts, summary)


@click.command()
@click.option('--preset', default='drift', type=click.Choice(sorted(scenario_suite())), help='Scenario preset')
@click.option('--seeds', default='0,1,2,3,4', help='Comma-separated seeds')
@click.option('--views-sweep', is_flag=True, help='Also sweep views per polyp at fixed batch capacity')
@click.option('--out', '-o', required=True, type=click.Path(file_okay=False), help='Output directory')
@click.option('--epochs', type=int, help='Training epochs')
@click.option('--threshold-grid', help='Threshold grid')
@click.option('--preference-grid', help='Preference grid')
@click.option('--gamma-grid', help='Gamma grid')
@click.option('--alpha-grid', help='Alpha grid')
@click.pass_context
def ablate(ctx, preset, seeds, views_sweep, out, epochs, threshold_grid, preference_grid, gamma_grid, alpha_grid):
    """Compare loss modes and clustering algorithms by LOOCV FR over several seeds."""
    try:
        seed_list = [int(s) for s in seeds.split(",") if s.strip()]
    except ValueError:
        raise click.BadParameter(f"invalid seed list {seeds!r}", param_hint="--seeds")
    if not seed_list:
        raise click.BadParameter("at least one seed is required", param_hint="--seeds")

    overrides = {"trainer.epochs": epochs}
    overrides.update(grid_overrides(threshold_grid, preference_grid, gamma_grid, alpha_grid))
    config = load_config(ctx, overrides)
    params = {"preset": preset, "seeds": seed_list, "views_sweep": views_sweep}
    output = run_ablate(config.results_dict(), Path(out), jobs=config.jobs, **params)
    finish("ablate", config, out, output, params)
