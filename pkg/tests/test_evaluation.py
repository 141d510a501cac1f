import csv

import pytest
from pydantic import ValidationError

from polypcount.clustering import ClusteringConfig
from polypcount.errors import ConfigError, DataError
from polypcount.evaluation import (
    ALPHA_GRID,
    GAMMA_GRID,
    PREFERENCE_GRID,
    THRESHOLD_GRID,
    EvaluationConfig,
    EvaluationVideo,
    GridResult,
    GridSpec,
    GroundTruth,
    VideoScore,
    evaluate_config,
    false_positive_rate,
    fragmentation_rate,
    grid_search,
    group_descriptors,
    loocv,
    parse_grid,
    select_hyperparams,
    write_grid,
    write_report,
    wrong_merge_rate,
)

from .conftest import one_hot_descriptors


def test_fragmentation_rate_examples():
    assert fragmentation_rate([0, 0, 1], ["a", "a", "b"]) == 1.0
    assert fragmentation_rate([0, 1, 2], ["a", "a", "b"]) == 1.5
    assert fragmentation_rate([0, 0, 0], ["a", "a", "b"]) == 0.5


def test_false_positive_rate_examples():
    assert false_positive_rate([0, 1, 2], ["a", "a", "b"]) == 0.0
    assert false_positive_rate([0, 0, 1], ["a", "a", "b"]) == 0.0
    assert false_positive_rate([0, 0, 0], ["a", "a", "b"]) == pytest.approx(2 / 3)


def test_wrong_merge_rate():
    assert wrong_merge_rate([0, 0, 0], ["a", "a", "b"]) == 0.5
    assert wrong_merge_rate([0, 1, 2], ["a", "a", "b"]) == 0.0


def test_metrics_ignore_label_names():
    entities = ["a", "b", "a", "c", "b"]
    for labels, renamed in [([0, 0, 1, 2, 2], [7, 7, 3, 9, 9]), ([0, 1, 0, 1, 1], [5, 2, 5, 2, 2])]:
        assert fragmentation_rate(labels, entities) == fragmentation_rate(renamed, entities)
        assert false_positive_rate(labels, entities) == false_positive_rate(renamed, entities)


def test_metrics_reject_misaligned_input():
    with pytest.raises(ValueError):
        fragmentation_rate([0, 1], ["a"])
    with pytest.raises(ValueError):
        false_positive_rate([], [])


def _result(index, fr, fpr):
    score = VideoScore(video_id="v", fr=fr, fpr=fpr, n_tracklets=4, n_entities=2, n_clusters=2)
    return GridResult(index=index, config={"threshold": 0.5}, scores=[score])


def test_selection_breaks_ties_by_lower_fr():
    results = [_result(0, 3.0, 0.04), _result(1, 2.5, 0.06)]
    assert select_hyperparams(results, rho=0.05).index == 1


def test_selection_breaks_full_ties_by_grid_order():
    results = [_result(0, 1.0, 0.0), _result(1, 1.0, 0.0), _result(2, 0.5, 0.5)]
    assert select_hyperparams(results, rho=0.0).index == 0


def test_constrained_selection():
    results = [_result(0, 3.0, 0.04), _result(1, 2.5, 0.06), _result(2, 2.8, 0.0)]
    assert select_hyperparams(results, rho=0.05, selection="constrained").index == 2
    assert select_hyperparams(results, rho=0.01, selection="constrained").index == 2
    fallback = [_result(0, 3.0, 0.2), _result(1, 2.5, 0.3)]
    assert select_hyperparams(fallback, rho=0.05, selection="constrained").index == 0
    with pytest.raises(ConfigError):
        select_hyperparams(fallback, selection="best")


def test_selection_averages_over_chosen_videos():
    scores = [VideoScore("v0", 1.0, 0.0, 2, 2, 2), VideoScore("v1", 2.0, 0.5, 2, 2, 2)]
    result = GridResult(index=0, config={}, scores=scores)
    assert result.mean_fr([1]) == 2.0
    assert result.mean_fpr() == 0.25


def test_default_grid_cardinalities():
    assert (len(THRESHOLD_GRID), len(PREFERENCE_GRID), len(GAMMA_GRID), len(ALPHA_GRID)) == (101, 41, 34, 21)
    assert GAMMA_GRID[:2] == (0.1, 0.2)
    assert 1.0 in GAMMA_GRID and 1.375 in GAMMA_GRID
    grid = GridSpec()
    base = ClusteringConfig()
    assert len(grid.configs("threshold", base)) == 101
    assert len(grid.configs("ap", base)) == 41


def test_configs_run_from_fewest_merges():
    grid = GridSpec(threshold=[0.5, 0.9, 0.1], preference=[-1.0, 1.0, 0.0], gamma=[1.0, 2.0], alpha=[0.5, 1.0])
    base = ClusteringConfig(damping=0.7)
    assert [c.threshold for c in grid.configs("threshold", base)] == [0.9, 0.5, 0.1]
    assert [c.preference for c in grid.configs("ap", base)] == [1.0, 0.0, -1.0]
    configs = grid.configs("temporal_ap", base)
    assert len(configs) == 12
    assert (configs[0].gamma, configs[0].alpha, configs[0].preference) == (2.0, 1.0, 1.0)
    assert all(c.algorithm == "temporal_ap" and c.damping == 0.7 for c in configs)
    assert len(grid.configs("none", base)) == 1
    with pytest.raises(ConfigError):
        grid.configs("kmeans", base)


def test_grid_values_are_validated():
    with pytest.raises(ValidationError):
        GridSpec(threshold=[1.5])
    with pytest.raises(ValidationError):
        GridSpec(gamma=[0.0])


def test_parse_grid():
    assert parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("1, 2.5") == [1.0, 2.5]
    assert parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    for text in ["a,b", "", "1:0:0.1", "0:1"]:
        with pytest.raises(ConfigError):
            parse_grid(text)


ENTITY_LAYOUTS = [[0, 1, 0, 2, 1], [0, 0, 1, 1], [2, 0, 1, 0, 2, 1]]


def _videos(layouts=ENTITY_LAYOUTS):
    return [EvaluationVideo(f"v{k}", one_hot_descriptors(layout), [f"e{e}" for e in layout])
            for k, layout in enumerate(layouts)]


def test_loocv_recovers_planted_entities():
    cfg = EvaluationConfig(rho=0.05, grid=GridSpec(threshold=[0.4, 0.75, 1.0]))
    report = loocv(_videos(), "threshold", cfg)
    assert report.fr == {"mean": 1.0, "std": 0.0}
    assert report.fpr == {"mean": 0.0, "std": 0.0}
    assert [f.hyperparameters for f in report.folds] == [{"threshold": 1.0}] * 3
    assert report.to_dict()["hyperparameters"] == {"threshold": {"mean": 1.0, "std": 0.0}}


def test_loocv_identical_videos_select_the_same_config():
    cfg = EvaluationConfig(rho=0.3, grid=GridSpec(threshold=[0.4, 0.75, 1.0]))
    report = loocv(_videos([[0, 1, 0, 1]] * 3), "threshold", cfg)
    assert len({f.config_index for f in report.folds}) == 1


def test_loocv_is_independent_of_jobs():
    cfg = EvaluationConfig(grid=GridSpec(preference=[-0.5, 0.5], gamma=[1.0, 4.0], alpha=[0.5, 1.0]))
    serial = loocv(_videos(), "temporal_ap", cfg, jobs=1)
    parallel = loocv(_videos(), "temporal_ap", cfg, jobs=3)
    assert serial.to_dict() == parallel.to_dict()


def test_loocv_without_clustering():
    report = loocv(_videos(), "none")
    assert report.fr["mean"] == pytest.approx((5 / 3 + 4 / 2 + 6 / 3) / 3)
    assert report.fpr["mean"] == 0.0
    assert all(f.hyperparameters == {} for f in report.folds)


def test_loocv_needs_two_videos():
    with pytest.raises(DataError):
        loocv(_videos()[:1], "threshold")


def test_loocv_with_merge_metric():
    cfg = EvaluationConfig(metric="merge", grid=GridSpec(threshold=[1.0]))
    report = loocv(_videos(), "threshold", cfg)
    assert report.metric == "merge"
    assert report.fpr["mean"] == 0.0


def test_grid_search_scores_every_config_on_every_video():
    results = grid_search(_videos(), "threshold", GridSpec(threshold=[1.0, 0.4]))
    assert [r.index for r in results] == [0, 1]
    assert [s.video_id for s in results[0].scores] == ["v0", "v1", "v2"]
    assert results[0].mean_fr() == 1.0
    assert results[1].scores[0].n_clusters == 1


def test_evaluate_fixed_config():
    report = evaluate_config(_videos(), ClusteringConfig(algorithm="threshold", threshold=1.0))
    assert report.fr["mean"] == 1.0
    assert report.to_dict()["config"]["threshold"] == 1.0
    assert "folds" not in report.to_dict()


def test_ground_truth_lookup():
    truth = GroundTruth(videos={"v0": {"t0": "a", "t1": "b"}, "v1": {"t0": "c"}})
    assert truth.entity_set("v0") == ["a", "b"]
    descriptors = {"v1": one_hot_descriptors([0]), "v0": one_hot_descriptors([0, 1])}
    videos = group_descriptors(descriptors, truth)
    assert [v.video_id for v in videos] == ["v0", "v1"]
    assert videos[0].entities == ["a", "b"]
    with pytest.raises(DataError):
        truth.entities_for("v1", ["t0", "t9"])
    with pytest.raises(DataError):
        truth.entities_for("v2", ["t0"])


def test_report_artifacts(tmp_path):
    videos = _videos()
    results = grid_search(videos, "threshold", GridSpec(threshold=[1.0]))
    report = loocv(videos, "threshold", EvaluationConfig(grid=GridSpec(threshold=[1.0])), results=results)
    paths = write_report(report, tmp_path) + [write_grid(results, tmp_path)]
    assert sorted(p.name for p in paths) == ["grid.csv", "report.json", "videos.csv"]
    with open(tmp_path / "grid.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0][:3] == ["index", "algorithm", "threshold"]
    assert len(rows) == 1 + 3 + 1
