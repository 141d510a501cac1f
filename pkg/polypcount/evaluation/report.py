"""Evaluation results and their JSON/CSV artifacts."""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..serialization import PathLike, write_csv, write_json


@dataclass
class VideoScore:
    """FR/FPR of one clustering of one video."""

    video_id: str
    fr: float
    fpr: float
    n_tracklets: int
    n_entities: int
    n_clusters: int
    converged: bool = True


@dataclass
class GridResult:
    """One grid configuration with its score on every video."""

    index: int
    config: Dict[str, Any]
    scores: List[VideoScore]

    def mean_fr(self, videos: Optional[Sequence[int]] = None) -> float:
        picked = self.scores if videos is None else [self.scores[i] for i in videos]
        return float(np.mean([s.fr for s in picked]))

    def mean_fpr(self, videos: Optional[Sequence[int]] = None) -> float:
        picked = self.scores if videos is None else [self.scores[i] for i in videos]
        return float(np.mean([s.fpr for s in picked]))


@dataclass
class FoldResult:
    """Held-out score of one LOOCV fold and the config selected for it."""

    video_id: str
    config_index: int
    hyperparameters: Dict[str, float]
    validation_fr: float
    validation_fpr: float
    score: VideoScore


def mean_std(values: Sequence[float]) -> Dict[str, float]:
    """Mean and population standard deviation."""
    values = np.asarray(values, dtype=float)
    return {"mean": float(values.mean()), "std": float(values.std())}


@dataclass
class EvaluationReport:
    """Per-video FR/FPR with their aggregates.

    ``folds`` is filled by LOOCV; a fixed-config evaluation leaves it empty
    and reports ``config`` instead.
    """

    algorithm: str
    metric: str
    scores: List[VideoScore]
    rho: Optional[float] = None
    selection: Optional[str] = None
    config: Optional[Dict[str, Any]] = None
    folds: List[FoldResult] = field(default_factory=list)

    @property
    def fr(self) -> Dict[str, float]:
        return mean_std([s.fr for s in self.scores])

    @property
    def fpr(self) -> Dict[str, float]:
        return mean_std([s.fpr for s in self.scores])

    def hyperparameter_summary(self) -> Dict[str, Dict[str, float]]:
        names = sorted({name for fold in self.folds for name in fold.hyperparameters})
        return {name: mean_std([fold.hyperparameters[name] for fold in self.folds]) for name in names}

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "algorithm": self.algorithm,
            "metric": self.metric,
            "n_videos": len(self.scores),
            "fr": self.fr,
            "fpr": self.fpr,
            "videos": [asdict(s) for s in self.scores],
        }
        if self.config is not None:
            payload["config"] = self.config
        if self.folds:
            payload.update({
                "rho": self.rho,
                "selection": self.selection,
                "hyperparameters": self.hyperparameter_summary(),
                "folds": [asdict(f) for f in self.folds],
            })
        return payload


GRID_HEADER = ["index", "algorithm", "threshold", "preference", "gamma", "alpha", "video_id", "fr", "fpr"]
VIDEO_HEADER = ["video_id", "fr", "fpr", "n_tracklets", "n_entities", "n_clusters", "converged"]


def write_report(report: EvaluationReport, out_dir: PathLike) -> List[Path]:
    """Write report.json and videos.csv.

    Returns:
        Written paths
    """
    out_dir = Path(out_dir)
    rows = [[s.video_id, s.fr, s.fpr, s.n_tracklets, s.n_entities, s.n_clusters, s.converged]
            for s in report.scores]
    return [write_json(report.to_dict(), out_dir / "report.json"),
            write_csv(rows, VIDEO_HEADER, out_dir / "videos.csv")]


def write_grid(results: Sequence[GridResult], out_dir: PathLike) -> Path:
    """Write grid.csv: one row per (config, video) plus a mean row per config."""
    rows = []
    for result in results:
        c = result.config
        prefix = [result.index, c["algorithm"], c["threshold"], c["preference"], c["gamma"], c["alpha"]]
        rows.extend(prefix + [s.video_id, s.fr, s.fpr] for s in result.scores)
        rows.append(prefix + ["mean", result.mean_fr(), result.mean_fpr()])
    return write_csv(rows, GRID_HEADER, Path(out_dir) / "grid.csv")
