"""Generate command implementation."""

from pathlib import Path
from typing import Any, Dict, Mapping

import click

from ..manifest import RunOutput
from ..synth import generate as generate_scenario
from ..synth import get_preset, scenario_suite, write_scenario
from .common import finish, load_config, runner_config


def run_generate(config: Mapping[str, Any], out: Path, jobs: int = 1) -> RunOutput:
    """Generate the configured scenario into ``out``."""
    cfg = runner_config(config)
    scenario = generate_scenario(cfg.synth, cfg.tracklets, jobs)
    artifacts = write_scenario(scenario, out)
    return RunOutput(artifacts, {
        "videos": len(scenario.videos),
        "train_videos": sum(v.split == "train" for v in scenario.videos),
        "entities": sum(len(v.entities) for v in scenario.videos),
        "tracklets": sum(len(t) for t in scenario.tracklets.values()),
        "detections": len(scenario.records),
    })


@click.command()
@click.option('--preset', type=click.Choice(sorted(scenario_suite())), help='Named scenario preset')
@click.option('--out', '-o', required=True, type=click.Path(file_okay=False), help='Output data directory')
@click.option('--seed', type=int, help='Scenario seed')
@click.option('--n-videos', type=int, help='Evaluation videos')
@click.option('--n-train-videos', type=int, help='Training videos')
@click.option('--feature-dim', type=int, help='Frame feature dimension')
@click.option('--sigma', type=float, help='Intra-entity feature noise')
@click.option('--beta', type=float, help='Temporal feature drift')
@click.option('--video-length', type=int, help='Video length in frames')
@click.pass_context
def generate(ctx, preset, out, seed, n_videos, n_train_videos, feature_dim, sigma, beta, video_length):
    """Generate a synthetic scenario (detections.jsonl + truth.json).

    A preset replaces the synth section of the configuration; explicit
    flags override the preset.
    """
    overrides: Dict[str, Any] = {}
    if preset:
        overrides.update({f"synth.{k}": v for k, v in get_preset(preset).model_dump().items()})
    overrides.update({
        "synth.seed": seed,
        "synth.n_videos": n_videos,
        "synth.n_train_videos": n_train_videos,
        "synth.feature_dim": feature_dim,
        "synth.sigma": sigma,
        "synth.beta": beta,
        "synth.video_length": video_length,
    })
    config = load_config(ctx, overrides)
    ctx.obj['logger'].info(f"Generating {preset or 'configured'} scenario into {out}")
    output = run_generate(config.results_dict(), Path(out), config.jobs)
    finish("generate", config, out, output, params={}, seed_key="synth.seed")
