import numpy as np
import pytest

from hvs5m.errors import DimensionError
from hvs5m.tensor_ops import (
    channel_attention_multiply,
    concat,
    global_pool_mean,
    global_pool_std,
)

from oracles import attention_multiply_loop, pool_mean_loop, pool_std_loop


class TestChannelAttentionMultiply:
    def test_identity_mask(self):
        rng = np.random.default_rng(0)
        features = rng.normal(size=(4, 5, 3))
        out = channel_attention_multiply(features, np.ones((4, 5, 1)))
        np.testing.assert_array_equal(out, features)

    def test_constant_scaling(self):
        features = np.ones((3, 3, 4))
        mask = np.full((3, 3, 1), 2.0)
        np.testing.assert_array_equal(
            channel_attention_multiply(features, mask), np.full((3, 3, 4), 2.0)
        )

    def test_matches_scalar_loop(self):
        rng = np.random.default_rng(1)
        features = rng.normal(size=(2, 2, 2))
        mask = rng.normal(size=(2, 2, 1))
        np.testing.assert_allclose(
            channel_attention_multiply(features, mask),
            attention_multiply_loop(features, mask),
            rtol=0,
            atol=0,
        )

    def test_shape_mismatch_names_both_shapes(self):
        with pytest.raises(DimensionError, match=r"\(4, 4, 2\).*\(3, 4, 1\)"):
            channel_attention_multiply(np.zeros((4, 4, 2)), np.zeros((3, 4, 1)))

    def test_linear_in_both_arguments(self):
        rng = np.random.default_rng(2)
        f1 = rng.normal(size=(3, 3, 2))
        f2 = rng.normal(size=(3, 3, 2))
        m = rng.normal(size=(3, 3, 1))
        np.testing.assert_allclose(
            channel_attention_multiply(f1 + f2, m),
            channel_attention_multiply(f1, m) + channel_attention_multiply(f2, m),
            atol=1e-12,
        )


class TestGlobalPooling:
    def test_mean_constant_field(self):
        out = global_pool_mean(np.full((5, 4, 3), 3.5))
        np.testing.assert_allclose(out, np.full(3, 3.5))

    def test_mean_symmetry(self):
        features = np.zeros((2, 2, 1))
        features[0, 0, 0] = 1.0
        features[1, 1, 0] = 1.0
        np.testing.assert_allclose(global_pool_mean(features), [0.5])

    def test_mean_matches_scalar_loop(self):
        rng = np.random.default_rng(3)
        features = rng.normal(size=(3, 3, 2))
        np.testing.assert_allclose(
            global_pool_mean(features), pool_mean_loop(features), atol=1e-6
        )

    def test_std_constant_is_zero(self):
        np.testing.assert_array_equal(global_pool_std(np.full((4, 4, 2), 7.0)), [0.0, 0.0])

    def test_std_symmetric_two_point(self):
        features = np.ones((2, 2, 1))
        features[0, :, 0] = -1.0
        np.testing.assert_allclose(global_pool_std(features), [1.0])

    def test_std_matches_scalar_loop(self):
        rng = np.random.default_rng(4)
        features = rng.normal(size=(4, 4, 3))
        np.testing.assert_allclose(
            global_pool_std(features), pool_std_loop(features), atol=1e-6
        )

    def test_leading_axes_preserved(self):
        rng = np.random.default_rng(5)
        stack = rng.normal(size=(4, 3, 3, 2))
        pooled = global_pool_mean(stack)
        assert pooled.shape == (4, 2)
        np.testing.assert_allclose(pooled[1], pool_mean_loop(stack[1]), atol=1e-6)

    def test_rank_too_low_rejected(self):
        with pytest.raises(DimensionError):
            global_pool_mean(np.zeros((3, 3)))

    def test_empty_spatial_extent_rejected(self):
        with pytest.raises(DimensionError):
            global_pool_std(np.zeros((0, 3, 2)))

    @pytest.mark.parametrize("size", [2, 4, 8])
    def test_pooling_permutation_invariant(self, size):
        rng = np.random.default_rng(size)
        features = rng.normal(size=(size, size, size))
        flat = features.reshape(size * size, size)
        shuffled = flat[rng.permutation(size * size)].reshape(size, size, size)
        np.testing.assert_allclose(
            global_pool_mean(features), global_pool_mean(shuffled), atol=1e-12
        )
        np.testing.assert_allclose(
            global_pool_std(features), global_pool_std(shuffled), atol=1e-12
        )

    def test_std_nonnegative_and_zero_iff_constant(self):
        rng = np.random.default_rng(6)
        features = rng.normal(size=(8, 8, 8))
        out = global_pool_std(features)
        assert (out >= 0).all()
        assert (out > 0).all()  # generic random slices are not constant

    def test_scalar_oracles_at_largest_declared_size(self):
        rng = np.random.default_rng(7)
        features = rng.normal(size=(8, 8, 8))
        mask = rng.normal(size=(8, 8, 1))
        np.testing.assert_allclose(
            channel_attention_multiply(features, mask),
            attention_multiply_loop(features, mask),
            atol=1e-12,
        )
        np.testing.assert_allclose(global_pool_mean(features), pool_mean_loop(features), atol=1e-6)
        np.testing.assert_allclose(global_pool_std(features), pool_std_loop(features), atol=1e-6)


class TestConcat:
    def test_statistic_vector_width(self):
        parts = [np.zeros(2048) for _ in range(4)]
        assert concat(parts, axis=0).shape == (8192,)

    def test_fused_width(self):
        a = np.zeros((4, 8192))
        b = np.zeros((4, 512))
        assert concat([a, b], axis=1).shape == (4, 8704)

    def test_single_part_identity(self):
        x = np.arange(6.0).reshape(2, 3)
        np.testing.assert_array_equal(concat([x], axis=0), x)

    def test_ordering_preserved(self):
        out = concat([np.array([1.0, 2.0]), np.array([3.0])], axis=0)
        np.testing.assert_array_equal(out, [1.0, 2.0, 3.0])

    def test_incompatible_shapes_rejected(self):
        with pytest.raises(DimensionError):
            concat([np.zeros((2, 3)), np.zeros((3, 3))], axis=1)
