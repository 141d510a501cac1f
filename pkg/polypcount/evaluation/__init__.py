"""Fragmentation/false-positive metrics, grid search and LOOCV."""

from .grids import (
    ALPHA_GRID,
    GAMMA_GRID,
    PREFERENCE_GRID,
    THRESHOLD_GRID,
    GridSpec,
    parse_grid,
    tuned_parameters,
)
from .metrics import FPR_METRICS, false_positive_rate, fragmentation_rate, wrong_merge_rate
from .models import EvaluationConfig, EvaluationVideo, GroundTruth, group_descriptors
from .report import (
    EvaluationReport,
    FoldResult,
    GridResult,
    VideoScore,
    mean_std,
    write_grid,
    write_report,
)
from .search import evaluate_config, grid_search, loocv, score_clustering, score_video, select_hyperparams

__all__ = [
    "ALPHA_GRID",
    "EvaluationConfig",
    "EvaluationReport",
    "EvaluationVideo",
    "FPR_METRICS",
    "FoldResult",
    "GAMMA_GRID",
    "GridResult",
    "GridSpec",
    "GroundTruth",
    "PREFERENCE_GRID",
    "THRESHOLD_GRID",
    "VideoScore",
    "evaluate_config",
    "false_positive_rate",
    "fragmentation_rate",
    "grid_search",
    "group_descriptors",
    "loocv",
    "mean_std",
    "parse_grid",
    "score_clustering",
    "score_video",
    "select_hyperparams",
    "tuned_parameters",
    "write_grid",
    "write_report",
    "wrong_merge_rate",
]
