import json
import shutil

import pytest

from polypcount import __version__
from polypcount.cli import cli
from polypcount.cli.registry import RUNNERS

from .conftest import stderr_json, stdout_json


TINY_TRAINING = ["--epochs", "2", "--batches-per-epoch", "2", "--batch-size", "8", "--views-per-polyp", "4",
                 "--polyps-per-batch", "2", "--embedding-dim", "8", "--hidden-dim", "4"]


def test_version(runner):
    result = runner.invoke(cli, ["version"])
    assert stdout_json(result) == {"tool": "polypcount", "version": __version__}


def test_init_config(runner, tmp_path):
    result = runner.invoke(cli, ["init-config", "--path", str(tmp_path / "cfg.json")])
    payload = stdout_json(result)
    assert payload["config_file"] == str(tmp_path / "cfg.json")
    assert json.loads((tmp_path / "cfg.json").read_text())["clustering.algorithm"] == "temporal_ap"


def test_every_subcommand_has_a_runner():
    commands = set(cli.commands) - {"init-config", "version", "reproduce"}
    assert commands == set(RUNNERS)


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory, easy_data):
    """train -> embed on the easy scenario, shared by the pipeline tests."""
    from click.testing import CliRunner

    try:
        runner = CliRunner(mix_stderr=False)
    except TypeError:
        runner = CliRunner()
    root = tmp_path_factory.mktemp("pipeline")
    train = runner.invoke(cli, ["-j", "1", "train", "--data", str(easy_data), "--out", str(root / "train")]
                          + TINY_TRAINING)
    embed = runner.invoke(cli, ["-j", "1", "embed", "--data", str(easy_data), "--out", str(root / "embed"),
                                "--checkpoint", str(root / "train" / "checkpoint.json")])
    return {"root": root, "data": easy_data, "train": train, "embed": embed,
            "embeddings": root / "embed" / "embeddings.json", "truth": easy_data / "truth.json"}


def test_train_and_embed(pipeline):
    summary = stdout_json(pipeline["train"])
    assert summary["epochs"] == 2
    assert summary["mode"] == "temporally_aware"
    assert sorted(summary["artifacts"]) == ["checkpoint.json", "losses.csv"]
    embedded = stdout_json(pipeline["embed"])
    assert embedded["videos"] == 3
    assert embedded["tracklets"] == 12
    assert embedded["head"] == "checkpoint"


def test_cluster_recovers_planted_entities(runner, pipeline, tmp_path):
    result = runner.invoke(cli, ["cluster", "--embeddings", str(pipeline["embeddings"]),
                                 "--truth", str(pipeline["truth"]), "--out", str(tmp_path),
                                 "--algorithm", "threshold", "--threshold", "1.0"])
    summary = stdout_json(result)
    assert summary["algorithm"] == "threshold"
    for video in summary["videos"].values():
        assert (video["fr"], video["fpr"], video["n_clusters"]) == (1.0, 0.0, 2)


def _loocv(runner, pipeline, out, jobs):
    return runner.invoke(cli, ["-j", str(jobs), "loocv", "--embeddings", str(pipeline["embeddings"]),
                               "--truth", str(pipeline["truth"]), "--out", str(out),
                               "--algorithm", "threshold", "--threshold-grid", "1.0,0.99", "--rho", "0"])


def test_loocv_recovers_planted_entities(runner, pipeline, tmp_path):
    report = stdout_json(_loocv(runner, pipeline, tmp_path, 1))
    assert report["fr"]["mean"] == 1.0
    assert report["fpr"]["mean"] == 0.0
    assert len(report["folds"]) == 3
    assert sorted(report["artifacts"]) == ["grid.csv", "report.json", "videos.csv"]


def test_loocv_is_independent_of_jobs(runner, pipeline, tmp_path):
    stdout_json(_loocv(runner, pipeline, tmp_path / "serial", 1))
    stdout_json(_loocv(runner, pipeline, tmp_path / "parallel", 3))
    for name in ["report.json", "grid.csv", "videos.csv"]:
        assert (tmp_path / "serial" / name).read_bytes() == (tmp_path / "parallel" / name).read_bytes()


def test_loocv_reproduces(runner, pipeline, tmp_path):
    stdout_json(_loocv(runner, pipeline, tmp_path, 2))
    result = runner.invoke(cli, ["reproduce", "--manifest", str(tmp_path / "manifest.json")])
    assert stdout_json(result)["match"] is True


def test_evaluate_without_checkpoint(runner, pipeline, tmp_path):
    result = runner.invoke(cli, ["evaluate", "--data", str(pipeline["data"]), "--out", str(tmp_path),
                                 "--algorithm", "threshold", "--threshold", "1.0"])
    report = stdout_json(result)
    assert report["fr"]["mean"] == 1.0
    assert report["config"]["threshold"] == 1.0


def test_generate_reproduces(runner, tmp_path):
    out = tmp_path / "gen"
    result = runner.invoke(cli, ["generate", "--out", str(out), "--seed", "3", "--n-videos", "1",
                                 "--n-train-videos", "0"])
    summary = stdout_json(result)
    assert summary["videos"] == 1
    assert sorted(summary["artifacts"]) == ["detections.jsonl", "truth.json"]

    manifest = out / "manifest.json"
    assert stdout_json(runner.invoke(cli, ["reproduce", "-m", str(manifest)]))["match"] is True

    data = json.loads(manifest.read_text())
    data["seed"] = 4
    manifest.write_text(json.dumps(data))
    result = runner.invoke(cli, ["reproduce", "-m", str(manifest)])
    assert result.exit_code == 3
    error = stderr_json(result)
    assert error["error"] == "ReproductionMismatch"
    assert {a["artifact"] for a in error["artifacts"]} >= {"detections.jsonl", "truth.json"}


def test_tracklets_command(runner, easy_data, tmp_path):
    summary = stdout_json(runner.invoke(cli, ["tracklets", "--data", str(easy_data), "--out", str(tmp_path)]))
    assert summary["tracklets"] == 24
    assert summary["skipped"] == 0
    dumped = json.loads((tmp_path / "tracklets.json").read_text())
    assert sorted(dumped["videos"]) == ["eval000", "eval001", "eval002", "train000", "train001", "train002"]


def test_loss_check(runner):
    summary = stdout_json(runner.invoke(cli, ["loss-check", "--batches", "5"]))
    assert summary["passed"] is True
    assert set(summary["per_mode"]) == {"self_supervised", "supervised", "temporally_aware"}


def test_ablate_single_seed(runner, tmp_path):
    config = tmp_path / "ablate.json"
    config.write_text(json.dumps({"trainer.batches_per_epoch": 2, "trainer.embedding_dim": 8,
                                  "trainer.hidden_dim": 0}))
    result = runner.invoke(cli, ["-c", str(config), "ablate", "--preset", "easy", "--seeds", "0", "--epochs", "1",
                                 "--out", str(tmp_path / "ablate"), "--preference-grid", "0",
                                 "--gamma-grid", "1", "--alpha-grid", "1"])
    summary = stdout_json(result)
    assert set(summary["mean_fr"]) == {"self_supervised/temporal_ap", "supervised/temporal_ap",
                                       "temporally_aware/temporal_ap", "temporally_aware/ap"}
    assert set(summary["orderings"]) == {"temporally_aware <= supervised", "supervised <= self_supervised",
                                         "temporal_ap <= ap"}
    rows = (tmp_path / "ablate" / "ablation.csv").read_text().splitlines()
    assert len(rows) == 1 + 4


def test_ablate_drift_orderings_hold_over_seeds(runner, tmp_path):
    out = tmp_path / "ablate"
    result = runner.invoke(cli, ["ablate", "--preset", "drift", "--seeds", "0,1,2,3,4", "--out", str(out),
                                 "--preference-grid=-1:1:0.25", "--gamma-grid", "4,1", "--alpha-grid", "1,0.5"])
    summary = stdout_json(result)
    assert summary["seeds"] == [0, 1, 2, 3, 4]
    assert all(summary["orderings"].values()), summary["mean_fr"]
    rows = (out / "ablation.csv").read_text().splitlines()
    assert len(rows) == 1 + 5 * 4


def test_orderings_are_non_strict():
    from polypcount.cli.ablate import _orderings

    means = {("temporally_aware", "temporal_ap"): 1.0, ("supervised", "temporal_ap"): 1.0,
             ("self_supervised", "temporal_ap"): 1.5, ("temporally_aware", "ap"): 1.0}
    assert all(_orderings(means).values())
    means[("temporally_aware", "temporal_ap")] = 1.25
    assert _orderings(means) == {"temporally_aware <= supervised": False, "supervised <= self_supervised": True,
                                 "temporal_ap <= ap": False}


def test_temporal_ap_recovers_easy_preset_in_every_fold(runner, tmp_path):
    data, train, embed = tmp_path / "data", tmp_path / "train", tmp_path / "embed"
    stdout_json(runner.invoke(cli, ["generate", "--preset", "easy", "--out", str(data)]))
    stdout_json(runner.invoke(cli, ["train", "--data", str(data), "--out", str(train), "--epochs", "5",
                                    "--batches-per-epoch", "5", "--batch-size", "8", "--views-per-polyp", "4",
                                    "--polyps-per-batch", "2", "--embedding-dim", "16", "--hidden-dim", "0"]))
    stdout_json(runner.invoke(cli, ["embed", "--data", str(data), "--out", str(embed),
                                    "--checkpoint", str(train / "checkpoint.json")]))
    result = runner.invoke(cli, ["loocv", "--embeddings", str(embed / "embeddings.json"),
                                 "--truth", str(data / "truth.json"), "--out", str(tmp_path / "loocv"),
                                 "--algorithm", "temporal_ap", "--preference-grid", "0.75,0.6",
                                 "--gamma-grid", "4,1", "--alpha-grid", "0.9,0.8"])
    report = stdout_json(result)
    assert len(report["folds"]) == 6
    for fold in report["folds"]:
        assert (fold["score"]["fr"], fold["score"]["fpr"]) == (1.0, 0.0), fold


def test_train_passes_head_and_tracklet_flags(runner, easy_data, tmp_path):
    stdout_json(runner.invoke(cli, ["train", "--data", str(easy_data), "--out", str(tmp_path)] + TINY_TRAINING
                              + ["--activation", "relu", "--stride", "2", "--iou-min", "0.3"]))
    checkpoint = json.loads((tmp_path / "checkpoint.json").read_text())
    assert checkpoint["trainer"]["activation"] == "relu"
    assert checkpoint["head"]["activation"] == "relu"
    assert checkpoint["tracklets"]["sampling_stride"] == 2
    assert checkpoint["tracklets"]["iou_min"] == 0.3


def test_embed_passes_tracklet_flags(runner, easy_data, tmp_path):
    stdout_json(runner.invoke(cli, ["embed", "--data", str(easy_data), "--out", str(tmp_path), "--stride", "2",
                                    "--iou-min", "0.3"]))
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["tracklets"]["sampling_stride"] == 2
    assert manifest["config"]["tracklets"]["iou_min"] == 0.3


def test_ablate_rejects_bad_seeds(runner, tmp_path):
    result = runner.invoke(cli, ["ablate", "--seeds", "a,b", "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert stderr_json(result)["error"] == "BadParameter"


def test_missing_data_directory(runner, tmp_path):
    missing = tmp_path / "nowhere"
    result = runner.invoke(cli, ["train", "--data", str(missing), "--out", str(tmp_path / "out")])
    assert result.exit_code == 3
    error = stderr_json(result)
    assert error["error"] == "DataError"
    assert str(missing) in error["message"]


def test_malformed_detection_line(runner, easy_data, tmp_path):
    data = tmp_path / "data"
    data.mkdir()
    shutil.copy(easy_data / "truth.json", data / "truth.json")
    good = (easy_data / "detections.jsonl").read_text().splitlines()[0]
    (data / "detections.jsonl").write_text(good + "\n{oops\n")
    result = runner.invoke(cli, ["tracklets", "--data", str(data), "--out", str(tmp_path / "out")])
    assert result.exit_code == 3
    error = stderr_json(result)
    assert error["line"] == 2
    assert error["path"].endswith("detections.jsonl")


def test_unknown_config_key(runner, tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"trainer.momentum": 0.9}))
    result = runner.invoke(cli, ["-c", str(config), "loss-check", "--batches", "1"])
    assert result.exit_code == 2
    assert stderr_json(result)["error"] == "ConfigError"


def test_capacity_violation_from_flags(runner, easy_data, tmp_path):
    result = runner.invoke(cli, ["train", "--data", str(easy_data), "--out", str(tmp_path),
                                 "--batch-size", "8", "--views-per-polyp", "4", "--polyps-per-batch", "3"])
    assert result.exit_code == 2
    assert stderr_json(result)["error"] == "ConfigError"


def test_usage_errors(runner, tmp_path):
    result = runner.invoke(cli, ["loocv", "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert stderr_json(result)["error"] == "UsageError"
    assert runner.invoke(cli, ["-j", "0", "version"]).exit_code == 2
