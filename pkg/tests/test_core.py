"""Unit tests for the stateless numerical kernels."""

import math

import numpy as np
import pytest

from boostcache import (ClassBank, ConfigError, DimError, InvalidVector, clip_logits,
                        entropy, normalize, scale_affinity, softmax)

# Closed-form oracle values, frozen from hand derivation:
#   softmax((1,0), T=1) = (e/(1+e), 1/(1+e))
#   A(0; alpha=1, beta=1) = e^-1, A(0.5; alpha=2, beta=2) = 2 e^-1
E_OVER_1PE = 0.7310585786300049
ONE_OVER_1PE = 0.2689414213699951
EXP_NEG1 = 0.36787944117144233
TWO_EXP_NEG1 = 0.7357588823428847


class TestNormalize:
    def test_three_four_five(self):
        np.testing.assert_allclose(normalize([3.0, 4.0]), [0.6, 0.8], rtol=0, atol=1e-15)

    def test_idempotent_on_unit_vector(self):
        np.testing.assert_array_equal(normalize([1.0, 0.0, 0.0]), [1.0, 0.0, 0.0])

    def test_zero_vector_rejected(self):
        with pytest.raises(InvalidVector):
            normalize([0.0, 0.0])

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidVector):
            normalize([1.0, float("nan")])
        with pytest.raises(InvalidVector):
            normalize([1.0, float("inf")])

    def test_random_vectors_unit_norm(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            v = rng.standard_normal(int(rng.integers(1, 40)))
            if np.linalg.norm(v) == 0:
                continue
            u = normalize(v)
            assert abs(np.linalg.norm(u) - 1.0) <= 1e-6
            np.testing.assert_allclose(normalize(u), u, rtol=0, atol=1e-12)


class TestClassBank:
    def test_requires_two_classes(self):
        with pytest.raises(ConfigError):
            ClassBank(np.ones((1, 3)), ("only",))

    def test_name_count_must_match(self):
        with pytest.raises(ConfigError):
            ClassBank(np.eye(3), ("a", "b"))

    def test_rows_must_be_unit(self):
        with pytest.raises(InvalidVector):
            ClassBank(2.0 * np.eye(3), ("a", "b", "c"))

    def test_from_rows_normalizes(self):
        bank = ClassBank.from_rows([[3.0, 4.0], [5.0, 0.0]], ("a", "b"))
        np.testing.assert_allclose(bank.weights, [[0.6, 0.8], [1.0, 0.0]], atol=1e-15)


class TestClipLogits:
    def test_self_similarity_is_one(self):
        rng = np.random.default_rng(11)
        bank = ClassBank.from_rows(rng.standard_normal((4, 8)), [f"c{i}" for i in range(4)])
        z = clip_logits(bank.weights[2], bank)
        np.testing.assert_allclose(z[2], 1.0, atol=1e-12)

    def test_orthogonal_embedding_gives_zeros(self):
        bank = ClassBank.from_rows(np.eye(4)[:3], ["a", "b", "c"])
        z = clip_logits(np.array([0.0, 0.0, 0.0, 1.0]), bank)
        np.testing.assert_allclose(z, np.zeros(3), atol=1e-15)

    def test_two_dim_direct_dots(self):
        bank = ClassBank(np.eye(2), ("a", "b"))
        np.testing.assert_allclose(clip_logits(np.array([0.6, 0.8]), bank), [0.6, 0.8],
                                   rtol=0, atol=1e-15)

    def test_dim_mismatch(self):
        bank = ClassBank(np.eye(2), ("a", "b"))
        with pytest.raises(DimError):
            clip_logits(np.array([1.0, 0.0, 0.0]), bank)

    def test_cauchy_schwarz_bound(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            n, c = int(rng.integers(2, 9)), int(rng.integers(2, 24))
            bank = ClassBank.from_rows(rng.standard_normal((n, c)), [f"c{i}" for i in range(n)])
            e = normalize(rng.standard_normal(c))
            assert np.max(np.abs(clip_logits(e, bank))) <= 1.0 + 1e-6


class TestSoftmax:
    def test_symmetry(self):
        np.testing.assert_allclose(softmax([0.0, 0.0], 1.0), [0.5, 0.5], atol=1e-15)

    def test_closed_form(self):
        np.testing.assert_allclose(softmax([1.0, 0.0], 1.0), [E_OVER_1PE, ONE_OVER_1PE],
                                   rtol=0, atol=1e-12)

    def test_saturation_at_low_temperature(self):
        np.testing.assert_allclose(softmax([1.0, 0.0], 0.01), [1.0, 0.0], atol=1e-6)

    def test_nonpositive_temperature_rejected(self):
        with pytest.raises(ConfigError):
            softmax([1.0, 0.0], 0.0)
        with pytest.raises(ConfigError):
            softmax([1.0, 0.0], -1.0)

    def test_sums_to_one_across_temperatures(self):
        rng = np.random.default_rng(5)
        for temp in (1e-4, 1e-2, 1.0, 1e2):
            for _ in range(50):
                z = rng.standard_normal(int(rng.integers(2, 12))) * 10
                assert abs(softmax(z, temp).sum() - 1.0) <= 1e-6

    def test_argmax_preserved(self):
        rng = np.random.default_rng(6)
        for temp in (1e-3, 0.5, 2.0, 50.0):
            for _ in range(50):
                z = rng.standard_normal(6)
                assert int(np.argmax(softmax(z, temp))) == int(np.argmax(z))


class TestEntropy:
    def test_one_hot_is_zero(self):
        assert entropy([1.0, 0.0]) == 0.0

    def test_uniform_two(self):
        np.testing.assert_allclose(entropy([0.5, 0.5]), math.log(2), atol=1e-12)

    def test_uniform_four(self):
        np.testing.assert_allclose(entropy([0.25] * 4), math.log(4), atol=1e-12)

    def test_rejects_non_probability(self):
        with pytest.raises(InvalidVector):
            entropy([0.9, 0.3])
        with pytest.raises(InvalidVector):
            entropy([1.2, -0.2])

    def test_bounds_and_shift_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(2, 10))
            z = rng.standard_normal(n) * 5
            h = entropy(softmax(z, 1.0))
            assert 0.0 <= h <= math.log(n) + 1e-12
            shifted = entropy(softmax(z + float(rng.standard_normal()) * 10, 1.0))
            assert abs(h - shifted) <= 1e-9


class TestScaleAffinity:
    def test_unit_similarity_returns_alpha(self):
        for alpha, beta in [(1.0, 1.0), (2.0, 5.0), (0.3, 0.0)]:
            np.testing.assert_allclose(scale_affinity(1.0, alpha, beta), alpha, atol=1e-15)

    def test_closed_form_values(self):
        np.testing.assert_allclose(scale_affinity(0.0, 1.0, 1.0), EXP_NEG1, rtol=0, atol=1e-12)
        np.testing.assert_allclose(scale_affinity(0.5, 2.0, 2.0), TWO_EXP_NEG1, rtol=0, atol=1e-12)

    def test_parameter_validation(self):
        with pytest.raises(ConfigError):
            scale_affinity(0.0, 0.0, 1.0)
        with pytest.raises(ConfigError):
            scale_affinity(0.0, -1.0, 1.0)
        with pytest.raises(ConfigError):
            scale_affinity(0.0, 1.0, -0.1)

    def test_monotone_and_bounded(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            alpha = float(rng.random() * 3 + 0.1)
            beta = float(rng.random() * 8 + 0.1)
            z = np.sort(rng.uniform(-1, 1, 10))
            a = scale_affinity(z, alpha, beta)
            assert np.all(np.diff(a) > 0)
            assert np.all(a > 0) and np.all(a <= alpha + 1e-12)
