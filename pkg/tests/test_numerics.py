import math
import os
import sys

import numpy as np
import pytest

# Add the project root to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from vital.exceptions import ConfigException, ShapeException
from vital.models.network import Activation, MlpLayer, MlpParams
from vital.utils.numerics import (
    derive_seed,
    finite_diff_check,
    init_mlp,
    make_rng,
    mlp_forward,
    mlp_forward_rows,
    seeded_init,
    sinusoidal_pe,
    softmax_rows,
)


def naive_forward(params: MlpParams, x):
    """Triple-loop reference implementation"""
    h = list(x)
    for layer in params.layers:
        out = []
        for i in range(layer.out_dim):
            total = layer.bias[i]
            for j in range(layer.in_dim):
                total += layer.weight[i, j] * h[j]
            if layer.activation is Activation.RELU:
                total = max(total, 0.0)
            out.append(total)
        h = out
    return np.array(h)


class TestMlpForward:
    """Test suite for the dense MLP forward pass"""

    def test_zero_weights_return_bias(self):
        layer = MlpLayer(np.zeros((3, 4)), np.array([1.0, -2.0, 0.5]))
        result = mlp_forward(MlpParams((layer,)), [9.0, 8.0, 7.0, 6.0])
        assert np.array_equal(result, np.array([1.0, -2.0, 0.5]))

    def test_identity_layer(self):
        layer = MlpLayer(np.eye(3), np.zeros(3))
        assert np.array_equal(mlp_forward(MlpParams((layer,)), [0.1, -0.2, 0.3]), np.array([0.1, -0.2, 0.3]))

    def test_matches_naive_loops(self):
        rng = make_rng(42)
        params = init_mlp(rng, [6, 5, 3], [Activation.RELU, Activation.IDENTITY], scale=0.7)
        x = rng.uniform(-1, 1, size=6)
        assert np.max(np.abs(mlp_forward(params, x) - naive_forward(params, x))) < 1e-12

    def test_rows_match_single_vectors(self):
        rng = make_rng(3)
        params = init_mlp(rng, [4, 4, 2], [Activation.RELU, Activation.IDENTITY])
        rows = rng.normal(size=(5, 4))
        batched = mlp_forward_rows(params, rows)
        for i in range(5):
            assert np.allclose(batched[i], mlp_forward(params, rows[i]), atol=1e-14)

    def test_dimension_mismatch(self):
        params = init_mlp(make_rng(0), [4, 2], [Activation.IDENTITY])
        with pytest.raises(ShapeException):
            mlp_forward(params, [1.0, 2.0, 3.0])

    def test_layers_must_chain(self):
        first = MlpLayer(np.zeros((3, 2)), np.zeros(3))
        second = MlpLayer(np.zeros((1, 4)), np.zeros(1))
        with pytest.raises(ShapeException):
            MlpParams((first, second))


class TestSoftmaxRows:
    """Test suite for the row-wise softmax"""

    def test_uniform_row(self):
        assert np.allclose(softmax_rows([[0.0, 0.0, 0.0, 0.0]]), [[0.25, 0.25, 0.25, 0.25]])

    def test_log_weights(self):
        result = softmax_rows([[math.log(1), math.log(2), math.log(3)]])
        assert np.allclose(result, [[1 / 6, 2 / 6, 3 / 6]], atol=1e-15)

    def test_large_values_are_stable(self):
        result = softmax_rows([[1000.0, 1000.0], [-1000.0, 0.0]])
        assert np.all(np.isfinite(result))
        assert np.allclose(result.sum(axis=1), 1.0)

    def test_rows_sum_to_one(self):
        m = make_rng(9).normal(size=(20, 13)) * 30
        assert np.max(np.abs(softmax_rows(m).sum(axis=1) - 1.0)) < 1e-12

    def test_empty_matrix(self):
        with pytest.raises(ShapeException):
            softmax_rows(np.zeros((0, 3)))


class TestSinusoidalPositions:
    """Test suite for the fixed positional table"""

    def test_row_zero_pattern(self):
        table = sinusoidal_pe(3, 8)
        assert np.array_equal(table[0], np.array([0.0, 1.0] * 4))

    def test_reference_values(self):
        table = sinusoidal_pe(2, 4)
        expected = np.array([0.841471, 0.540302, 0.010000, 0.999950])
        assert np.max(np.abs(table[1] - expected)) < 1e-5

    def test_entries_bounded(self):
        table = sinusoidal_pe(500, 32)
        assert table.shape == (500, 32)
        assert np.all(np.abs(table) <= 1.0)

    @pytest.mark.parametrize("dim", [2, 8, 32])
    def test_rows_pairwise_distinct(self, dim):
        table = sinusoidal_pe(64, dim)
        gaps = np.linalg.norm(table[:, None, :] - table[None, :, :], axis=2)
        off_diagonal = gaps[~np.eye(64, dtype=bool)]
        assert off_diagonal.min() > 1e-6

    def test_odd_dim_rejected(self):
        with pytest.raises(ConfigException):
            sinusoidal_pe(4, 5)


class TestGradientCheck:
    """Test suite for the finite-difference check"""

    def test_identity_mlp(self):
        rng = make_rng(1)
        params = init_mlp(rng, [5, 4, 3], [Activation.IDENTITY, Activation.IDENTITY], scale=0.5)
        error = finite_diff_check(params, rng.normal(size=5), rng.normal(size=5), h=1e-5)
        assert error < 1e-6

    def test_relu_mlp_away_from_kinks(self):
        for seed in range(20):
            rng = make_rng(seed)
            params = init_mlp(rng, [5, 6, 3], [Activation.RELU, Activation.IDENTITY], scale=0.5)
            x = rng.normal(size=5)
            v = rng.normal(size=5)
            pre = params.layers[0].weight @ x + params.layers[0].bias
            if np.min(np.abs(pre)) > 1e-2:
                break
        assert finite_diff_check(params, x, v, h=1e-5) < 1e-4

    def test_fifty_seeded_networks(self):
        worst = 0.0
        for seed in range(50):
            rng = make_rng(seed)
            params = init_mlp(rng, [6, 5, 4], [Activation.IDENTITY, Activation.IDENTITY], scale=0.5)
            worst = max(worst, finite_diff_check(params, rng.normal(size=6), rng.normal(size=6), h=1e-5))
        assert worst < 1e-5

    def test_zero_direction_rejected(self):
        params = init_mlp(make_rng(0), [3, 2], [Activation.IDENTITY])
        with pytest.raises(ConfigException):
            finite_diff_check(params, [1.0, 2.0, 3.0], [0.0, 0.0, 0.0])


class TestSeededInit:
    """Test suite for seeded initialization"""

    def test_same_seed_identical(self):
        a = seeded_init(make_rng(5), 4, 6, 0.1)
        b = seeded_init(make_rng(5), 4, 6, 0.1)
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self):
        assert not np.array_equal(seeded_init(make_rng(5), 4, 6), seeded_init(make_rng(6), 4, 6))

    def test_scale_bounds_entries(self):
        assert np.all(np.abs(seeded_init(make_rng(11), 30, 30, 0.1)) <= 0.1)

    def test_nonpositive_scale_rejected(self):
        with pytest.raises(ConfigException):
            seeded_init(make_rng(0), 2, 2, 0.0)

    def test_derived_seeds(self):
        assert derive_seed(7, 1) == derive_seed(7, 1)
        assert derive_seed(7, 1) != derive_seed(7, 2)
        assert derive_seed(7, 1) != derive_seed(8, 1)
