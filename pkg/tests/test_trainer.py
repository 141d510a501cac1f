import numpy as np
import pytest
from pydantic import ValidationError

from polypcount.errors import DataError, NumericalError
from polypcount.loss import LossConfig, LossMode
from polypcount.trainer import (
    EmbeddingHead,
    TrainerConfig,
    batch_loss,
    embed_fragments,
    embed_tracklets,
    head_gradient_check,
    initialize_head,
    load_checkpoint,
    make_optimizer,
    sample_batch,
    save_checkpoint,
    train,
)

from .conftest import make_fragment, make_training_set


SMALL = dict(batch_size=8, views_per_polyp=4, polyps_per_batch=2, epochs=30, batches_per_epoch=5,
             learning_rate=0.05, optimizer="adam", embedding_dim=4, hidden_dim=0, seed=3)


def test_capacity_is_validated():
    with pytest.raises(ValidationError):
        TrainerConfig(batch_size=8, views_per_polyp=4, polyps_per_batch=3)
    assert TrainerConfig().rows_per_batch == 42


def test_sample_batch_composition():
    dataset = make_training_set(n_entities=5)
    batch = sample_batch(dataset, TrainerConfig(), np.random.default_rng(0))
    assert batch.features.shape == (42, 6)
    labels, counts = np.unique(batch.entity_ids, return_counts=True)
    assert len(labels) == 3
    assert counts.tolist() == [14, 14, 14]
    assert set(batch.entity_spans) == set(labels)


def test_sample_batch_needs_enough_entities():
    dataset = make_training_set(n_entities=5)
    cfg = TrainerConfig(views_per_polyp=2, polyps_per_batch=28)
    with pytest.raises(DataError):
        sample_batch(dataset, cfg, np.random.default_rng(0))


def test_sample_batch_is_seeded():
    dataset = make_training_set()
    cfg = TrainerConfig(**SMALL)
    a = sample_batch(dataset, cfg, np.random.default_rng(9))
    b = sample_batch(dataset, cfg, np.random.default_rng(9))
    assert np.array_equal(a.features, b.features)
    assert a.entity_ids == b.entity_ids


def test_view_pairs_for_self_supervised():
    dataset = make_training_set()
    batch = sample_batch(dataset, TrainerConfig(**SMALL), np.random.default_rng(1), LossMode.SELF_SUPERVISED)
    assert len(batch.view_tags) == 8
    assert batch.view_tags[0::2] == batch.view_tags[1::2]
    assert len(set(batch.view_tags)) == 4


def test_training_lowers_holdout_loss():
    dataset = make_training_set()
    cfg = TrainerConfig(**SMALL)
    loss_cfg = LossConfig(tau=0.5, lam=1.0)
    holdout = sample_batch(dataset, cfg, np.random.default_rng([cfg.seed, 1]))
    before = batch_loss(initialize_head(dataset, cfg), holdout, loss_cfg)

    result = train(dataset, initialize_head(dataset, cfg), loss_cfg, cfg)
    assert len(result.losses) == len(result.holdout_losses) == 30
    assert result.holdout_losses[-1] < before
    assert all(np.isfinite(result.losses))


THREE_ENTITIES = dict(batch_size=12, views_per_polyp=4, polyps_per_batch=3, epochs=50, batches_per_epoch=5,
                      learning_rate=0.01, optimizer="adam", embedding_dim=8, hidden_dim=0, seed=0)


def test_final_epoch_loss_below_first_epoch():
    dataset = make_training_set(n_entities=3)
    cfg = TrainerConfig(**THREE_ENTITIES)
    result = train(dataset, initialize_head(dataset, cfg), LossConfig(), cfg)
    assert len(result.losses) == 50
    assert result.losses[-1] < result.losses[0]


def test_holdout_loss_decreases_over_first_epochs():
    dataset = make_training_set(n_entities=3)
    cfg = TrainerConfig(**{**THREE_ENTITIES, "epochs": 5})
    holdout = train(dataset, initialize_head(dataset, cfg), LossConfig(), cfg).holdout_losses
    assert len(holdout) == 5
    assert all(later < earlier for earlier, later in zip(holdout, holdout[1:]))


def test_small_entity_pool_warns(caplog):
    dataset = make_training_set(n_entities=3, per_entity=2)
    cfg = TrainerConfig(**{**THREE_ENTITIES, "views_per_polyp": 4})
    with caplog.at_level("WARNING", logger="polypcount.trainer.sampler"):
        batch = sample_batch(dataset, cfg, np.random.default_rng(0))
    assert len(batch.entity_ids) == 12
    assert any(r.levelname == "WARNING" and "with replacement" in r.getMessage() for r in caplog.records)


def test_training_is_deterministic():
    dataset = make_training_set()
    cfg = TrainerConfig(**{**SMALL, "epochs": 3})
    first = train(dataset, initialize_head(dataset, cfg), LossConfig(), cfg)
    second = train(dataset, initialize_head(dataset, cfg), LossConfig(), cfg)
    assert first.losses == second.losses
    for p, q in zip(first.head.parameters(), second.head.parameters()):
        assert np.array_equal(p, q)


@pytest.mark.parametrize("optimizer", ["sgd", "adam"])
def test_zero_learning_rate_leaves_head_unchanged(optimizer):
    dataset = make_training_set()
    cfg = TrainerConfig(**{**SMALL, "epochs": 2, "learning_rate": 0.0, "optimizer": optimizer, "hidden_dim": 5})
    head = initialize_head(dataset, cfg)
    before = [p.copy() for p in head.parameters()]
    train(dataset, head, LossConfig(), cfg)
    for p, q in zip(before, head.parameters()):
        assert np.array_equal(p, q)


def test_train_rejects_mismatched_head():
    dataset = make_training_set(dim=6)
    cfg = TrainerConfig(**SMALL)
    with pytest.raises(DataError):
        train(dataset, EmbeddingHead.initialize(5, 4), LossConfig(), cfg)


def test_unknown_optimizer():
    with pytest.raises(ValueError):
        make_optimizer("rmsprop", EmbeddingHead.initialize(3, 2), 0.1)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_head_gradient_matches_finite_differences(seed):
    assert head_gradient_check(seed) < 1e-4


@pytest.mark.parametrize("hidden_dim, activation", [(0, "tanh"), (16, "tanh"), (16, "relu")])
def test_head_outputs_unit_norm(hidden_dim, activation):
    head = EmbeddingHead.initialize(10, 7, hidden_dim, activation, seed=5)
    out = head.embed(np.random.default_rng(0).standard_normal((1000, 10)))
    assert out.shape == (1000, 7)
    np.testing.assert_allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-9)


def test_head_rejects_non_finite_input():
    head = EmbeddingHead.initialize(3, 2)
    with pytest.raises(NumericalError):
        head.embed(np.array([[1.0, np.nan, 0.0]]))


def test_embed_without_head_normalizes_features():
    fragments = [make_fragment("t0", [3.0, 4.0]), make_fragment("t1", [0.0, 2.0])]
    np.testing.assert_allclose(embed_fragments(None, fragments), [[0.6, 0.8], [0.0, 1.0]])


def test_embed_tracklets_means_fragments():
    fragments = [make_fragment("t0", [1.0, 0.0], index=0), make_fragment("t0", [0.0, 1.0], index=1),
                 make_fragment("t1", [0.0, 5.0])]
    embeddings = embed_tracklets(None, fragments)
    assert list(embeddings) == ["t0", "t1"]
    np.testing.assert_allclose(embeddings["t0"], [2 ** -0.5, 2 ** -0.5])
    np.testing.assert_allclose(embeddings["t1"], [0.0, 1.0])


def test_single_fragment_tracklet_equals_fragment_embedding():
    head = EmbeddingHead.initialize(2, 3, hidden_dim=4, seed=1)
    fragment = make_fragment("t0", [0.3, -1.2])
    np.testing.assert_allclose(embed_tracklets(head, [fragment])["t0"], embed_fragments(head, [fragment])[0])


def test_embed_rejects_mismatched_head():
    with pytest.raises(DataError):
        embed_fragments(EmbeddingHead.initialize(3, 2), [make_fragment("t0", [1.0, 0.0])])


def test_checkpoint_round_trip(tmp_path):
    head = EmbeddingHead.initialize(4, 3, hidden_dim=5, activation="relu", seed=2)
    path = save_checkpoint(head, tmp_path / "head.json", {"seed": 2, "losses": [1.5, 1.2]})
    loaded, metadata = load_checkpoint(path)
    assert metadata == {"seed": 2, "losses": [1.5, 1.2]}
    assert loaded.activation == "relu"
    x = np.random.default_rng(0).standard_normal((6, 4))
    assert np.array_equal(loaded.embed(x), head.embed(x))


def test_checkpoint_wrong_format(tmp_path):
    path = tmp_path / "head.json"
    path.write_text('{"format": "something-else"}', encoding="utf-8")
    with pytest.raises(DataError):
        load_checkpoint(path)


def test_checkpoint_non_finite_parameters(tmp_path):
    path = tmp_path / "head.json"
    path.write_text('{"format": "polypcount-head", "version": 1, "head": {"activation": "tanh", '
                    '"layers": [{"shape": [1, 2], "W": [NaN, 1.0], "b": [0.0, 0.0]}]}}', encoding="utf-8")
    with pytest.raises(DataError):
        load_checkpoint(path)


def test_checkpoint_bad_shapes(tmp_path):
    path = tmp_path / "head.json"
    path.write_text('{"format": "polypcount-head", "version": 1, "head": {"activation": "tanh", '
                    '"layers": [{"shape": [2, 2], "W": [1.0, 1.0], "b": [0.0, 0.0]}]}}', encoding="utf-8")
    with pytest.raises(DataError):
        load_checkpoint(path)
