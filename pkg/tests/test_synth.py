import json
from collections import defaultdict

import numpy as np
import pytest
from pydantic import ValidationError

from polypcount.errors import ScenarioError
from polypcount.synth import (
    DETECTIONS_FILE,
    TRUTH_FILE,
    ScenarioConfig,
    generate,
    get_preset,
    place_centroids,
    scenario_suite,
    write_scenario,
)
from polypcount.tracklets import FragmentConfig, build_tracklets

from .conftest import EASY_SCENARIO


def test_generation_is_byte_deterministic(tmp_path, easy_config):
    first = write_scenario(generate(easy_config), tmp_path / "a")
    second = write_scenario(generate(easy_config), tmp_path / "b")
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_seed_changes_output(easy_config):
    other = easy_config.model_copy(update={"seed": 8})
    assert generate(easy_config).records != generate(other).records


def test_generation_is_independent_of_jobs(easy_config):
    serial = generate(easy_config, jobs=1)
    parallel = generate(easy_config, jobs=4)
    assert serial.records == parallel.records
    assert serial.tracklets == parallel.tracklets


def test_video_ids_and_splits(easy_config):
    scenario = generate(easy_config)
    assert [v.video_id for v in scenario.videos] == ["train000", "train001", "train002",
                                                     "eval000", "eval001", "eval002"]
    assert [v.split for v in scenario.videos] == ["train"] * 3 + ["eval"] * 3
    assert scenario.videos[0].entities == ["train000-p0", "train000-p1"]


def test_noise_free_entities_have_identical_features(easy_config):
    features = defaultdict(set)
    for record in generate(easy_config).records:
        features[record.entity_id].add(record.feature)
    assert all(len(f) == 1 for f in features.values())
    assert len({next(iter(f)) for f in features.values()}) == len(features)


def test_truth_covers_every_tracklet(easy_config):
    scenario = generate(easy_config)
    for video in scenario.videos:
        built = build_tracklets(video.records, FragmentConfig())
        truth = scenario.tracklets[video.video_id]
        assert len(built) == 4
        assert {t.tracklet_id for t in built} == set(truth)
        assert all(truth[t.tracklet_id] == t.entity_id for t in built)


def test_tracklets_stay_inside_video_and_frame(easy_config):
    for video in generate(easy_config).videos:
        for record in video.records:
            assert 0 <= record.frame_index < video.video_length
            x1, y1, x2, y2 = record.bbox
            assert 0 <= x1 < x2 <= video.frame_size[0] + 1e-9
            assert 0 <= y1 < y2 <= video.frame_size[1] + 1e-9


def test_truth_file_layout(tmp_path, easy_config):
    paths = write_scenario(generate(easy_config), tmp_path)
    assert [p.name for p in paths] == [DETECTIONS_FILE, TRUTH_FILE]
    truth = json.loads((tmp_path / TRUTH_FILE).read_text())
    assert truth["scenario"]["seed"] == 7
    assert truth["videos"]["eval001"]["split"] == "eval"
    assert truth["videos"]["eval001"]["video_length"] == 600
    assert len(truth["tracklets"]["eval001"]) == 4


def test_drift_is_linear_in_time():
    cfg = ScenarioConfig(**{**EASY_SCENARIO, "beta": 2.0, "n_videos": 1, "n_train_videos": 0})
    by_entity = defaultdict(list)
    for record in generate(cfg).records:
        by_entity[record.entity_id].append(record)
    for records in by_entity.values():
        first, last = records[0], records[-1]
        dt = (last.frame_index - first.frame_index) / cfg.video_length
        shift = np.linalg.norm(np.array(last.feature) - np.array(first.feature))
        assert shift == pytest.approx(2.0 * dt, rel=1e-9)


def test_centroids_keep_their_distance():
    centroids = place_centroids(5, 8, 2.0, np.random.default_rng(0))
    for i in range(5):
        for j in range(i + 1, 5):
            assert np.linalg.norm(centroids[i] - centroids[j]) >= 2.0


def test_unplaceable_centroids():
    with pytest.raises(ScenarioError):
        place_centroids(5, 1, 10.0, np.random.default_rng(0))


def test_video_too_short():
    cfg = ScenarioConfig(**{**EASY_SCENARIO, "video_length": 50, "tracklet_length": (40, 40), "gap_length": (5, 5)})
    with pytest.raises(ScenarioError):
        generate(cfg)


@pytest.mark.parametrize("update", [
    {"entities_per_video": (3, 2)},
    {"tracklet_length": (0, 4)},
    {"frame_size": (0.0, 10.0)},
    {"sigma": -0.1},
    {"colour": "red"},
])
def test_invalid_scenarios(update):
    with pytest.raises(ValidationError):
        ScenarioConfig(**{**EASY_SCENARIO, **update})


def test_presets():
    suite = scenario_suite()
    assert sorted(suite) == ["drift", "easy", "noisy", "paper-scale-ish"]
    assert suite["easy"].sigma == 0.0 and suite["easy"].beta == 0.0
    assert suite["drift"].beta > 0
    assert get_preset("paper-scale-ish").n_videos == 19
    with pytest.raises(KeyError):
        get_preset("hard")
