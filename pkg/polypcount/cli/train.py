"""Train command implementation."""

from pathlib import Path
from typing import Any, Mapping, Optional

import click

from ..dataset import load_dataset
from ..loss import LossMode
from ..manifest import RunOutput
from ..serialization import write_csv
from ..trainer import initialize_head, save_checkpoint, train as train_head
from .common import absolute, finish, load_config, runner_config, split_option


CHECKPOINT_FILE = "checkpoint.json"


def run_train(config: Mapping[str, Any], out: Path, data: str, split: Optional[str] = "train",
              jobs: int = 1) -> RunOutput:
    """Train an embedding head on the ``split`` videos of a data directory."""
    cfg = runner_config(config)
    dataset = load_dataset(data, cfg.tracklets).training_set(split)
    head = initialize_head(dataset, cfg.trainer)
    result = train_head(dataset, head, cfg.loss, cfg.trainer)

    out = Path(out)
    checkpoint = save_checkpoint(head, out / CHECKPOINT_FILE, {
        "trainer": cfg.trainer.model_dump(mode="json"),
        "loss": cfg.loss.model_dump(mode="json"),
        "tracklets": cfg.tracklets.model_dump(mode="json"),
        "seed": cfg.trainer.seed,
        "losses": result.losses,
        "holdout_losses": result.holdout_losses,
    })
    rows = [[epoch + 1, loss, holdout]
            for epoch, (loss, holdout) in enumerate(zip(result.losses, result.holdout_losses))]
    curve = write_csv(rows, ["epoch", "loss", "holdout_loss"], out / "losses.csv")
    return RunOutput([checkpoint, curve], {
        "mode": cfg.loss.mode.value,
        "fragments": len(dataset),
        "entities": len(dataset.by_entity),
        "epochs": len(result.losses),
        "first_loss": result.losses[0],
        "final_loss": result.losses[-1],
        "final_holdout_loss": result.holdout_losses[-1],
    })


@click.command()
@click.option('--data', '-d', required=True, help='Data directory with detections.jsonl and truth.json')
@click.option('--out', '-o', required=True, type=click.Path(file_okay=False), help='Output directory')
@click.option('--split', default='train', type=click.Choice(['train', 'eval', 'all']), help='Videos to train on')
@click.option('--mode', type=click.Choice([m.value for m in LossMode]), help='Loss mode')
@click.option('--tau', type=float, help='Softmax temperature')
@click.option('--lambda', 'lam', type=float, help='Temporal scaling of the soft targets')
@click.option('--epochs', type=int, help='Training epochs')
@click.option('--batches-per-epoch', type=int, help='Batches per epoch')
@click.option('--batch-size', type=int, help='Batch capacity B')
@click.option('--views-per-polyp', type=int, help='Fragments per entity in a batch (K)')
@click.option('--polyps-per-batch', type=int, help='Entities per batch')
@click.option('--learning-rate', '--lr', 'learning_rate', type=float, help='Learning rate')
@click.option('--optimizer', type=click.Choice(['sgd', 'adam']), help='Optimizer')
@click.option('--embedding-dim', type=int, help='Embedding dimension d')
@click.option('--hidden-dim', type=int, help='Hidden width (0 for a linear head)')
@click.option('--activation', type=click.Choice(['tanh', 'relu']), help='Hidden-layer nonlinearity')
@click.option('--seed', type=int, help='Training seed')
@click.option('--kappa', type=int, help='Fragment length in retained frames')
@click.option('--stride', 'sampling_stride', type=int, help='Keep one frame every N')
@click.option('--iou-min', type=float, help='Minimum IoU between consecutive detections')
@click.option('--psi', type=float, help='Bounding-box enlargement factor')
@click.pass_context
def train(ctx, data, out, split, mode, tau, lam, epochs, batches_per_epoch, batch_size, views_per_polyp,
          polyps_per_batch, learning_rate, optimizer, embedding_dim, hidden_dim, activation, seed, kappa,
          sampling_stride, iou_min, psi):
    """Train the embedding head with the contrastive loss."""
    config = load_config(ctx, {
        "loss.mode": mode,
        "loss.tau": tau,
        "loss.lam": lam,
        "trainer.epochs": epochs,
        "trainer.batches_per_epoch": batches_per_epoch,
        "trainer.batch_size": batch_size,
        "trainer.views_per_polyp": views_per_polyp,
        "trainer.polyps_per_batch": polyps_per_batch,
        "trainer.learning_rate": learning_rate,
        "trainer.optimizer": optimizer,
        "trainer.embedding_dim": embedding_dim,
        "trainer.hidden_dim": hidden_dim,
        "trainer.activation": activation,
        "trainer.seed": seed,
        "tracklets.kappa": kappa,
        "tracklets.sampling_stride": sampling_stride,
        "tracklets.iou_min": iou_min,
        "tracklets.psi": psi,
    })
    params = {"data": absolute(data), "split": split_option(split)}
    output = run_train(config.results_dict(), Path(out), jobs=config.jobs, **params)
    finish("train", config, out, output, params, inputs=[data], seed_key="trainer.seed")
