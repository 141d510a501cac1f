"""Grid search, FPR-targeted hyperparameter selection and LOOCV over videos."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from ..clustering import ClusteringConfig, ClusteringResult, cluster_matrix, similarity_matrix
from ..errors import ConfigError, DataError
from .grids import GridSpec, tuned_parameters
from .metrics import FPR_METRICS, fragmentation_rate
from .models import EvaluationConfig, EvaluationVideo
from .report import EvaluationReport, FoldResult, GridResult, VideoScore


logger = logging.getLogger(__name__)

# |FPR - rho| is compared at this many decimals so float noise cannot break ties
TIE_DECIMALS = 12


def score_clustering(video: EvaluationVideo, result: ClusteringResult, metric: str = "pair") -> VideoScore:
    """FR and FPR of one clustering of ``video``."""
    if metric not in FPR_METRICS:
        raise ConfigError(f"unknown FPR metric {metric!r}, expected one of {sorted(FPR_METRICS)}")
    return VideoScore(
        video_id=video.video_id,
        fr=fragmentation_rate(result.labels, video.entities),
        fpr=FPR_METRICS[metric](result.labels, video.entities),
        n_tracklets=len(result.labels),
        n_entities=len(set(video.entities)),
        n_clusters=result.n_clusters,
        converged=result.converged,
    )


def score_video(video: EvaluationVideo, configs: Sequence[ClusteringConfig], metric: str = "pair") -> List[VideoScore]:
    """Score every config on one video.

    Affinity Propagation results are memoized by (S, preference), so grid
    points that yield the same similarity matrix are clustered once.
    """
    memo: Dict[Tuple[bytes, float], ClusteringResult] = {}
    scores = []
    for cfg in configs:
        S = similarity_matrix(video.visual, video.positions, cfg)
        if cfg.algorithm in ("ap", "temporal_ap"):
            key = (S.tobytes(), cfg.preference)
            if key not in memo:
                memo[key] = cluster_matrix(S, cfg)
            result = memo[key]
        else:
            result = cluster_matrix(S, cfg)
        scores.append(score_clustering(video, result, metric))
    logger.debug(f"Video {video.video_id}: {len(configs)} configs, {len(memo)} distinct AP runs")
    return scores


def grid_search(videos: Sequence[EvaluationVideo], algorithm: str, grid: Optional[GridSpec] = None,
                base: Optional[ClusteringConfig] = None, metric: str = "pair",
                jobs: int = 1) -> List[GridResult]:
    """Evaluate every grid configuration on every video.

    Videos are scored concurrently; results come back in config order with
    scores in video order, independent of ``jobs``.

    Args:
        videos: Evaluation videos
        algorithm: Clustering algorithm to search
        grid: Grid values (default: full grids)
        base: Config supplying the non-searched settings
        metric: FPR metric name
        jobs: Worker threads

    Returns:
        One GridResult per configuration
    """
    if not videos:
        raise DataError("grid search needs at least one video")
    configs = (grid or GridSpec()).configs(algorithm, base or ClusteringConfig())
    logger.info(f"Grid search {algorithm}: {len(configs)} configs x {len(videos)} videos, {jobs} workers")

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        per_video = list(executor.map(lambda v: score_video(v, configs, metric), videos))

    return [
        GridResult(index=i, config=cfg.model_dump(), scores=[scores[i] for scores in per_video])
        for i, cfg in enumerate(configs)
    ]


def _closest(candidates: Sequence[Tuple[int, float, float]], rho: float) -> int:
    return min(candidates, key=lambda c: (round(abs(c[2] - rho), TIE_DECIMALS), c[1], c[0]))[0]


def select_hyperparams(results: Sequence[GridResult], rho: float = 0.05, selection: str = "closest",
                       videos: Optional[Sequence[int]] = None) -> GridResult:
    """Pick the grid configuration to use, from its mean scores over ``videos``.

    ``closest`` minimizes |FPR - rho|, breaking ties by lower FR and then by
    grid order. ``constrained`` takes the lowest FR among configs with
    FPR <= rho (ties by lower FPR, then grid order) and falls back to
    ``closest`` when none qualifies.

    Args:
        results: Grid results
        rho: Target false-positive rate
        selection: "closest" or "constrained"
        videos: Indices of the validation videos (default: all)

    Returns:
        The selected GridResult
    """
    if not results:
        raise ValueError("no grid results to select from")
    candidates = [(r.index, r.mean_fr(videos), r.mean_fpr(videos)) for r in results]
    by_index = {r.index: r for r in results}

    if selection == "constrained":
        feasible = [c for c in candidates if round(c[2] - rho, TIE_DECIMALS) <= 0]
        if feasible:
            return by_index[min(feasible, key=lambda c: (c[1], c[2], c[0]))[0]]
        logger.debug(f"No config reaches FPR <= {rho}; selecting the closest")
    elif selection != "closest":
        raise ConfigError(f"unknown selection policy {selection!r}")
    return by_index[_closest(candidates, rho)]


def _hyperparameters(result: GridResult, algorithm: str) -> Dict[str, float]:
    return {name: result.config[name] for name in tuned_parameters(algorithm)}


def loocv(videos: Sequence[EvaluationVideo], algorithm: str, cfg: Optional[EvaluationConfig] = None,
          base: Optional[ClusteringConfig] = None, jobs: int = 1,
          results: Optional[Sequence[GridResult]] = None) -> EvaluationReport:
    """Leave-one-video-out cross-validation of a clustering algorithm.

    Each config is scored once per video; fold k selects on every video but
    k and reports the selected config's score on video k.

    Args:
        videos: Evaluation videos, at least two
        algorithm: Clustering algorithm
        cfg: Selection settings and grids
        base: Config supplying the non-searched settings
        jobs: Worker threads for the grid search
        results: Precomputed grid results for these videos

    Returns:
        EvaluationReport with one fold per video
    """
    if len(videos) < 2:
        raise DataError(f"LOOCV needs at least 2 videos, got {len(videos)}")
    cfg = cfg or EvaluationConfig()
    if results is None:
        results = grid_search(videos, algorithm, cfg.grid, base, cfg.metric, jobs)

    folds = []
    for k, video in enumerate(videos):
        validation = [i for i in range(len(videos)) if i != k]
        chosen = select_hyperparams(results, cfg.rho, cfg.selection, validation)
        folds.append(FoldResult(
            video_id=video.video_id,
            config_index=chosen.index,
            hyperparameters=_hyperparameters(chosen, algorithm),
            validation_fr=chosen.mean_fr(validation),
            validation_fpr=chosen.mean_fpr(validation),
            score=chosen.scores[k],
        ))
        logger.info(f"Fold {video.video_id}: config {chosen.index} {folds[-1].hyperparameters} -> "
                    f"FR {folds[-1].score.fr:.4f}, FPR {folds[-1].score.fpr:.4f}")

    report = EvaluationReport(algorithm=algorithm, metric=cfg.metric, scores=[f.score for f in folds],
                              rho=cfg.rho, selection=cfg.selection, folds=folds)
    logger.info(f"LOOCV {algorithm}: FR {report.fr['mean']:.4f} +- {report.fr['std']:.4f}, "
                f"FPR {report.fpr['mean']:.4f} +- {report.fpr['std']:.4f}")
    return report


def evaluate_config(videos: Sequence[EvaluationVideo], config: ClusteringConfig, metric: str = "pair",
                    jobs: int = 1) -> EvaluationReport:
    """Score one fixed config on every video."""
    if not videos:
        raise DataError("evaluation needs at least one video")
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        scores = list(executor.map(lambda v: score_video(v, [config], metric)[0], videos))
    return EvaluationReport(algorithm=config.algorithm, metric=metric, scores=scores, config=config.model_dump())
