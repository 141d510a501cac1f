"""Subcommand name -> runner, used to re-run manifests."""

from typing import Dict

from ..manifest import Runner
from .ablate import run_ablate
from .cluster import run_cluster
from .embed import run_embed
from .evaluate import run_evaluate, run_grid_search, run_loocv
from .generate import run_generate
from .loss_check import run_loss_check
from .tracklets import run_tracklets
from .train import run_train


RUNNERS: Dict[str, Runner] = {
    "generate": run_generate,
    "tracklets": run_tracklets,
    "train": run_train,
    "embed": run_embed,
    "cluster": run_cluster,
    "evaluate": run_evaluate,
    "grid-search": run_grid_search,
    "loocv": run_loocv,
    "loss-check": run_loss_check,
    "ablate": run_ablate,
}
