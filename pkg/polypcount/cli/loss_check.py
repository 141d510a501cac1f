"""Loss-check command implementation."""

from pathlib import Path
from typing import Any, Mapping, Optional

import click

from ..errors import NumericalError
from ..loss import gradient_check
from ..manifest import RunOutput
from ..serialization import write_json
from ..trainer import head_gradient_check
from .common import emit, finish, load_config


LOSS_TOLERANCE = 1e-5
HEAD_TOLERANCE = 1e-4


def run_loss_check(config: Mapping[str, Any], out: Optional[Path], batches: int = 100, seed: int = 0,
                   jobs: int = 1) -> RunOutput:
    """Finite-difference check of the loss gradient and of head backprop."""
    per_mode = gradient_check(n_batches=batches, seed=seed)
    head_error = head_gradient_check(seed=seed)
    result = {
        "batches": batches,
        "seed": seed,
        "max_relative_error": per_mode.pop("max"),
        "per_mode": per_mode,
        "head_relative_error": head_error,
        "tolerance": LOSS_TOLERANCE,
        "head_tolerance": HEAD_TOLERANCE,
    }
    result["passed"] = result["max_relative_error"] <= LOSS_TOLERANCE and head_error <= HEAD_TOLERANCE
    artifacts = [write_json(result, Path(out) / "loss_check.json")] if out is not None else []
    return RunOutput(artifacts, result)


@click.command('loss-check')
@click.option('--batches', default=100, type=int, help='Random batches per loss mode')
@click.option('--seed', default=0, type=int, help='Seed of the random batches')
@click.option('--out', '-o', type=click.Path(file_okay=False), help='Optional output directory')
@click.pass_context
def loss_check(ctx, batches, seed, out):
    """Verify the analytic loss gradient against central finite differences."""
    config = load_config(ctx)
    params = {"batches": batches, "seed": seed}
    output = run_loss_check(config.results_dict(), Path(out) if out else None, **params)
    if out:
        finish("loss-check", config, out, output, params)
    else:
        emit(output.summary)
    if not output.summary["passed"]:
        raise NumericalError(f"gradient check failed: relative error {output.summary['max_relative_error']:.3e} "
                             f"(head {output.summary['head_relative_error']:.3e})")
