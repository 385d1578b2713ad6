"""
Tests for the mini-batch training loop and prediction.
"""

import numpy as np
import pytest

from src.config import TrainConfig
from src.data import Standardizer, apply_standardizer, fit_standardizer
from src.errors import BatchTooSmall, DimensionMismatch, LabelOutOfRange, TrainingDiverged, Unfitted
from src.ml import Network, TrainedModel, make_layout, predict, predict_logits, predict_proba, softmax_cross_entropy, train
from src.ml.trainer import batch_slices
from src.seeding import derive_seed


def toy_problem(seed=0, n=40, d=4):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d))
    y = (x[:, 0] > 0).astype(np.int64) * 5
    return x, y


class TestBatchSlices:
    """Test mini-batch boundaries."""

    def test_exact_multiple(self):
        """Test n divisible by the batch size."""
        assert [(s.start, s.stop) for s in batch_slices(6, 3)] == [(0, 3), (3, 6)]

    def test_partial_last_batch_is_kept(self):
        """Test a last batch of at least 2 rows stays separate."""
        assert [(s.start, s.stop) for s in batch_slices(8, 3)] == [(0, 3), (3, 6), (6, 8)]

    def test_single_row_tail_is_merged(self):
        """Test a trailing single row joins the previous batch."""
        assert [(s.start, s.stop) for s in batch_slices(7, 3)] == [(0, 3), (3, 7)]
        assert [(s.start, s.stop) for s in batch_slices(129, 128)] == [(0, 129)]


class TestTrain:
    """Test train()."""

    def test_deterministic(self):
        """Test the same data, config and seed give identical logs and weights."""
        x, y = toy_problem()
        spec = make_layout("sbnednn", input_dim=4, hidden_width=8)
        config = TrainConfig(batch_size=16, epochs=5, lr=0.01, seed=3)
        first, second = train(spec, x, y, config), train(spec, x, y, config)
        assert first.training_log == second.training_log
        for key, value in first.network.parameters().items():
            assert np.array_equal(value, second.network.parameters()[key])

    def test_zero_epochs_returns_initialization(self):
        """Test epochs 0 keeps the initial parameters and an empty log."""
        x, y = toy_problem()
        spec = make_layout("structure1", input_dim=4, hidden_width=8)
        model = train(spec, x, y, TrainConfig(epochs=0, seed=4))
        assert model.training_log == []
        assert model.optimizer_steps == 0
        initial = Network(spec, seed=derive_seed(4, "init")).parameters()
        for key, value in model.network.parameters().items():
            assert np.array_equal(value, initial[key])

    def test_learns_separable_data(self, separable_synthetic):
        """Test the BN network fits noise-free synthetic levels."""
        s = fit_standardizer(separable_synthetic)
        x = apply_standardizer(s, separable_synthetic)
        spec = make_layout("sbnednn", input_dim=separable_synthetic.n_features, hidden_width=32)
        model = train(spec, x, separable_synthetic.levels, TrainConfig(batch_size=32, epochs=40, lr=0.01, seed=1))
        assert model.training_log[-1].train_accuracy >= 0.99
        assert np.mean(predict(model, x) == separable_synthetic.levels) >= 0.99

    def test_first_epoch_improves_on_initial_loss(self, separable_synthetic):
        """Test the first epoch's mean loss is below the loss of the untrained network."""
        s = fit_standardizer(separable_synthetic)
        x = apply_standardizer(s, separable_synthetic)
        spec = make_layout("sbnednn", input_dim=separable_synthetic.n_features, hidden_width=32)
        config = TrainConfig(batch_size=32, epochs=1, lr=0.01, seed=1)
        logits, _ = Network(spec, seed=derive_seed(config.seed, "init")).forward_train(x)
        initial_loss, _ = softmax_cross_entropy(logits, separable_synthetic.levels, spec.num_classes)
        model = train(spec, x, separable_synthetic.levels, config)
        assert model.training_log[0].mean_loss < initial_loss

    def test_log_entries(self):
        """Test one log entry per epoch with finite losses and the Adam step count."""
        x, y = toy_problem(n=40)
        model = train(make_layout("sbnednn", input_dim=4, hidden_width=8), x, y,
                      TrainConfig(batch_size=16, epochs=3, patience=None))
        assert [entry.epoch for entry in model.training_log] == [1, 2, 3]
        assert all(np.isfinite(entry.mean_loss) for entry in model.training_log)
        assert model.optimizer_steps == 3 * len(batch_slices(40, 16))

    def test_last_epoch_accuracy_matches_predictions(self):
        """Test the logged accuracy is the inference-mode accuracy of the returned network."""
        x, y = toy_problem(n=60)
        model = train(make_layout("structure3", input_dim=4, hidden_width=8), x, y,
                      TrainConfig(batch_size=16, epochs=4, lr=0.01))
        assert model.training_log[-1].train_accuracy == pytest.approx(np.mean(predict(model, x) == y))

    def test_early_stop(self):
        """Test patience stops training once the loss stops improving."""
        x, y = toy_problem(n=40)
        model = train(make_layout("structure1", input_dim=4, hidden_width=8), x, y,
                      TrainConfig(batch_size=8, epochs=200, lr=5.0, patience=1))
        assert len(model.training_log) < 200

    def test_diverging_loss(self):
        """Test a non-finite loss raises TrainingDiverged."""
        x, y = toy_problem(n=20)
        x[3, 1] = np.nan
        with pytest.raises(TrainingDiverged):
            train(make_layout("structure1", input_dim=4, hidden_width=8), x, y, TrainConfig(epochs=2))

    def test_input_validation(self):
        """Test too few rows, wrong widths and bad labels."""
        spec = make_layout("structure1", input_dim=4, hidden_width=8)
        x, y = toy_problem(n=10)
        with pytest.raises(BatchTooSmall):
            train(spec, x[:1], y[:1])
        with pytest.raises(DimensionMismatch):
            train(spec, x[:, :3], y)
        with pytest.raises(LabelOutOfRange):
            train(spec, x, y + 3)


class TestPredict:
    """Test predict / predict_logits."""

    def test_ties_go_to_lowest_index(self):
        """Test exactly tied logits pick the lowest class."""
        spec = make_layout("structure1", input_dim=2, num_classes=4, hidden_width=3)
        network = Network(spec, seed=0)
        network.layers[-1].W[:] = 0.0
        network.layers[-1].b[:] = [0.0, 2.0, 2.0, 1.0]
        model = TrainedModel(spec=spec, network=network)
        assert predict(model, np.zeros((3, 2))).tolist() == [1, 1, 1]

    def test_strongly_favored_class(self):
        """Test a dominant logit wins and a per-row shift does not change the argmax."""
        spec = make_layout("structure1", input_dim=2, num_classes=6, hidden_width=3)
        network = Network(spec, seed=0)
        network.layers[-1].b[:] = [0.0, 0.0, 0.0, 50.0, 0.0, 0.0]
        model = TrainedModel(spec=spec, network=network)
        x = np.random.default_rng(0).normal(size=(4, 2))
        assert predict(model, x).tolist() == [3, 3, 3, 3]
        logits = predict_logits(model, x)
        assert np.array_equal(np.argmax(logits + np.arange(4)[:, None], axis=1), predict(model, x))

    def test_unfitted_batchnorm(self):
        """Test predicting with untrained BN layers raises Unfitted."""
        spec = make_layout("sbnednn", input_dim=2, hidden_width=3)
        with pytest.raises(Unfitted):
            predict(TrainedModel(spec=spec, network=Network(spec, seed=0)), np.zeros((1, 2)))

    def test_dimension_mismatch(self):
        """Test a wrong feature width raises DimensionMismatch."""
        spec = make_layout("structure1", input_dim=2, hidden_width=3)
        with pytest.raises(DimensionMismatch):
            predict(TrainedModel(spec=spec, network=Network(spec, seed=0)), np.zeros((1, 3)))

    def test_standardizer_is_applied(self):
        """Test a model with a standardizer accepts raw features."""
        x, y = toy_problem(n=30)
        raw = x * 10.0 + 50.0
        s = Standardizer(mean=np.full(4, 50.0), std=np.full(4, 10.0), zero_variance=np.zeros(4, dtype=bool))
        model = train(make_layout("sbnednn", input_dim=4, hidden_width=8), apply_standardizer(s, raw), y,
                      TrainConfig(batch_size=8, epochs=2))
        assert np.allclose(predict_logits(model.with_standardizer(s), raw), predict_logits(model, x), atol=1e-10)

    def test_probabilities_sum_to_one(self):
        """Test softmax probabilities are a distribution per row and agree with predict."""
        x, y = toy_problem(n=40)
        model = train(make_layout("sbnednn", input_dim=4, hidden_width=8), x, y,
                      TrainConfig(batch_size=16, epochs=3, lr=0.01))
        proba = predict_proba(model, x * 100.0)
        assert proba.shape == (40, 6)
        assert np.all(proba >= 0.0)
        assert np.allclose(proba.sum(axis=1), 1.0, rtol=0.0, atol=1e-9)
        assert np.array_equal(np.argmax(proba, axis=1), predict(model, x * 100.0))
