"""Tests for the relaxed classical training baseline."""

import numpy as np
import pytest

from aqtrain.classical import (
    AdamState,
    RelaxedModel,
    adam_step,
    gradient,
    relaxed_loss,
    train_pool,
    train_run,
)
from aqtrain.datasets import Dataset, balanced_pixel_split
from aqtrain.nn import accuracy, binary_pixel_model, toy_two_layer_model

# true column-detector weights in declaration order
PERFECT = np.array([1, 0, 1, 0, 0, 1, 0, 1, 1, 1], dtype=float)


def _setup(**kwargs):
    model = binary_pixel_model()
    relaxed = RelaxedModel(model, **kwargs)
    train, test = balanced_pixel_split(seed=0)
    return model, relaxed, train, test


def _empty_dataset():
    return Dataset(np.zeros((0, 4)), np.zeros(0, dtype=int))


class TestRelaxedModel:
    def test_mirrors_binary_architecture(self):
        model, relaxed, train, _ = _setup()
        assert relaxed.num_parameters == 10
        shapes = [m.shape for m in relaxed.split(np.zeros(10))]
        assert shapes == [(2, 4), (1, 2)]

    def test_rejects_polynomial_activations(self):
        with pytest.raises(ValueError):
            RelaxedModel(toy_two_layer_model())

    def test_rejects_wrong_parameter_count(self):
        _, relaxed, _, _ = _setup()
        with pytest.raises(ValueError):
            relaxed.split(np.zeros(9))

    def test_penalty_vanishes_at_binary_weights(self):
        model, relaxed, train, _ = _setup(penalty=7.0)
        free = RelaxedModel(model, penalty=0.0)
        assert relaxed_loss(relaxed, train, PERFECT) == pytest.approx(
            relaxed_loss(free, train, PERFECT)
        )

    def test_penalty_at_half(self):
        model, relaxed, train, _ = _setup(penalty=3.0)
        free = RelaxedModel(model, penalty=0.0)
        halves = np.full(10, 0.5)
        gap = relaxed_loss(relaxed, train, halves) - relaxed_loss(free, train, halves)
        assert gap == pytest.approx(3.0 * 10 / 16)

    def test_steep_sigmoid_approaches_binary_loss(self):
        # A pre-activation exactly at threshold sits at sigmoid value 1/2 for
        # every steepness, so the binary limit is only reached where all
        # majority sums have a margin: identical all-ones units (layer-two
        # sums 0 or 2, never the threshold 1) on images with pixel counts
        # away from 2.
        model = binary_pixel_model()
        features = np.array(
            [[0, 0, 0, 0], [1, 0, 0, 0], [1, 1, 1, 0], [1, 1, 1, 1]], dtype=float
        )
        data = Dataset(features, np.array([0, 0, 1, 1]))
        weights = np.concatenate([np.ones(8), np.ones(2)])
        exact = -2.0  # two true positives, no false positives
        losses = {
            k: relaxed_loss(RelaxedModel(model, steepness=k, penalty=0.0), data, weights)
            for k in (10.0, 100.0)
        }
        assert abs(losses[100.0] - exact) < 1e-8
        assert abs(losses[100.0] - exact) < abs(losses[10.0] - exact)


class TestGradient:
    @pytest.mark.parametrize("trial", range(6))
    def test_matches_finite_differences(self, trial):
        _, relaxed, train, _ = _setup()
        rng = np.random.default_rng(50 + trial)
        weights = rng.uniform(-0.2, 1.2, 10)
        grad = gradient(relaxed, train, weights)
        step = 1e-5
        for i in range(10):
            offset = np.zeros(10)
            offset[i] = step
            fd = (
                relaxed_loss(relaxed, train, weights + offset)
                - relaxed_loss(relaxed, train, weights - offset)
            ) / (2 * step)
            scale = max(abs(grad[i]), abs(fd), 1e-8)
            assert abs(grad[i] - fd) / scale <= 1e-4

    @pytest.mark.parametrize("value", [0.0, 0.5, 1.0])
    def test_penalty_stationary_points(self, value):
        _, relaxed, _, _ = _setup()
        weights = np.full(10, value)
        grad = gradient(relaxed, _empty_dataset(), weights)
        assert np.allclose(grad, 0.0, atol=1e-12)

    def test_empty_dataset_leaves_penalty_gradient(self):
        _, relaxed, _, _ = _setup(penalty=2.0)
        rng = np.random.default_rng(9)
        weights = rng.uniform(0, 1, 10)
        grad = gradient(relaxed, _empty_dataset(), weights)
        expected = 2.0 * (4 * weights**3 - 6 * weights**2 + 2 * weights)
        assert np.allclose(grad, expected, atol=1e-12)

    def test_non_finite_weights_raise(self):
        _, relaxed, train, _ = _setup()
        weights = np.full(10, 0.5)
        weights[3] = np.inf
        with pytest.raises(RuntimeError):
            gradient(relaxed, train, weights)


class TestAdam:
    def test_zero_gradient_keeps_weights(self):
        state = AdamState.initial(4)
        weights = np.array([0.1, 0.2, 0.3, 0.4])
        new_state, updated = adam_step(state, weights, np.zeros(4))
        assert np.array_equal(updated, weights)
        assert new_state.step == 1

    def test_first_step_moves_by_learning_rate(self):
        state = AdamState.initial(1, learning_rate=0.05)
        grads = np.array([3.7])
        _, updated = adam_step(state, np.array([1.0]), grads)
        # bias correction makes the first step lr * g / (|g| + eps)
        assert updated[0] == pytest.approx(1.0 - 0.05, rel=1e-6)

    def test_moment_update_formulas(self):
        state = AdamState.initial(1)
        grads = np.array([2.0])
        new_state, _ = adam_step(state, np.array([0.0]), grads)
        assert new_state.first_moment[0] == pytest.approx(0.1 * 2.0)
        assert new_state.second_moment[0] == pytest.approx(0.001 * 4.0)

    def test_converges_on_quadratic(self):
        # f(w) = (w - 3)^2 has gradient 2 (w - 3)
        weights = np.array([0.0])
        state = AdamState.initial(1, learning_rate=0.05)
        for _ in range(2000):
            state, weights = adam_step(state, weights, 2.0 * (weights - 3.0))
        assert abs(weights[0] - 3.0) <= 1e-4


class TestTrainRun:
    def test_seeded_reproducibility(self):
        _, relaxed, train, _ = _setup()
        one = train_run(relaxed, train, seed=11)
        two = train_run(relaxed, train, seed=11)
        assert np.array_equal(one.relaxed_weights, two.relaxed_weights)
        assert np.array_equal(one.binary_weights, two.binary_weights)

    def test_pool_slices_equal_single_runs(self):
        _, relaxed, train, _ = _setup()
        pool = train_pool(relaxed, train, [4, 5, 6], n_steps=120)
        for seed in (4, 5, 6):
            single = train_run(relaxed, train, seed=seed, n_steps=120)
            match = next(r for r in pool if r.seed == seed)
            assert np.array_equal(single.relaxed_weights, match.relaxed_weights)

    def test_weights_binarize(self):
        _, relaxed, train, _ = _setup()
        runs = train_pool(relaxed, train, range(60))
        weights = np.stack([r.relaxed_weights for r in runs])
        near = np.minimum(np.abs(weights), np.abs(weights - 1.0)) <= 0.1
        assert near.mean() >= 0.90
        binary = np.stack([r.binary_weights for r in runs])
        assert set(np.unique(binary)) <= {0.0, 1.0}

    def test_binarized_accuracy_spread(self):
        model, relaxed, train, test = _setup()
        runs = train_pool(relaxed, train, range(40))
        train_acc = np.array([accuracy(model, r.assignment(model), train) for r in runs])
        assert np.all((0.0 <= train_acc) & (train_acc <= 1.0))
        # local minima: decent but imperfect training accuracy overall
        assert 0.4 <= train_acc.mean() <= 0.9
        assert train_acc.max() < 1.0

    def test_rejects_empty_seed_list(self):
        _, relaxed, train, _ = _setup()
        with pytest.raises(ValueError):
            train_pool(relaxed, train, [])
        with pytest.raises(ValueError):
            train_run(relaxed, train, seed=0, n_steps=0)
