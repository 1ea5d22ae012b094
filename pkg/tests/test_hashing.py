"""Toeplitz hashing tests: linearity, universality, and the seed-image map."""

import itertools

import numpy as np
import pytest

from gauss_share.errors import DomainError, KTooLarge
from gauss_share.protocol.hashing import (
    InputHashMatrix,
    hash_matrix_for_input,
    privacy_amplify,
    seed_length,
    symbols_to_bits,
    toeplitz_hash,
)


def brute_hash(seed, v, k):
    """Direct convolution-sum transcription of the Toeplitz product."""
    seed = np.asarray(seed)
    v = np.asarray(v)
    n = v.size
    out = np.zeros(k, dtype=np.uint8)
    for i in range(k):
        acc = 0
        for t in range(seed.size):
            j = n - 1 + i - t
            if 0 <= j < n:
                acc += int(seed[t]) * int(v[j])
        out[i] = acc % 2
    return out


class TestSeedLength:
    def test_formula(self):
        assert seed_length(4, 4, 3) == 10
        assert seed_length(8, 2, 2) == 9
        assert seed_length(5, 8, 1) == 15

    def test_zero_secret_needs_no_seed(self):
        assert seed_length(4, 4, 0) == 0
        assert seed_length(4, 3, 0) == 0  # alphabet unchecked when unused

    def test_validation(self):
        with pytest.raises(DomainError):
            seed_length(4, 4, -1)
        with pytest.raises(DomainError):
            seed_length(4, 3, 2)
        with pytest.raises(DomainError):
            seed_length(4, 1, 2)


class TestSymbolBits:
    def test_big_endian_expansion(self):
        np.testing.assert_array_equal(
            symbols_to_bits([2], 4), np.array([1, 0], dtype=np.uint8)
        )
        np.testing.assert_array_equal(
            symbols_to_bits([2, 1, 3, 0], 4),
            np.array([1, 0, 0, 1, 1, 1, 0, 0], dtype=np.uint8),
        )
        np.testing.assert_array_equal(symbols_to_bits([5], 8), [1, 0, 1])

    def test_binary_alphabet_is_identity(self):
        np.testing.assert_array_equal(symbols_to_bits([0, 1, 1, 0], 2), [0, 1, 1, 0])

    def test_empty(self):
        assert symbols_to_bits([], 4).size == 0

    def test_validation(self):
        with pytest.raises(DomainError):
            symbols_to_bits([0, 3], 3)
        with pytest.raises(DomainError):
            symbols_to_bits([4], 4)
        with pytest.raises(DomainError):
            symbols_to_bits([-1], 4)


class TestToeplitzHash:
    def test_zero_secret_is_empty(self):
        assert toeplitz_hash(np.zeros(0), np.array([1, 0, 1]), 0).size == 0

    def test_zero_input_hashes_to_zero(self):
        rng = np.random.default_rng(1)
        seed = rng.integers(0, 2, 8 + 1 - 1)
        np.testing.assert_array_equal(toeplitz_hash(seed, np.zeros(8), 1), [0])

    def test_seed_size_enforced(self):
        with pytest.raises(DomainError):
            toeplitz_hash(np.zeros(5), np.zeros(8), 2)  # needs 9 bits

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(1, 12))
            k = int(rng.integers(1, 6))
            v = rng.integers(0, 2, n)
            seed = rng.integers(0, 2, n + k - 1)
            np.testing.assert_array_equal(
                toeplitz_hash(seed, v, k), brute_hash(seed, v, k)
            )

    def test_linear_in_the_seed(self):
        rng = np.random.default_rng(4)
        v = rng.integers(0, 2, 10)
        for _ in range(20):
            s1 = rng.integers(0, 2, 12)
            s2 = rng.integers(0, 2, 12)
            lhs = toeplitz_hash(s1 ^ s2, v, 3)
            rhs = toeplitz_hash(s1, v, 3) ^ toeplitz_hash(s2, v, 3)
            np.testing.assert_array_equal(lhs, rhs)

    def test_linear_in_the_input(self):
        rng = np.random.default_rng(5)
        seed = rng.integers(0, 2, 12)
        for _ in range(20):
            v1 = rng.integers(0, 2, 10)
            v2 = rng.integers(0, 2, 10)
            lhs = toeplitz_hash(seed, v1 ^ v2, 3)
            rhs = toeplitz_hash(seed, v1, 3) ^ toeplitz_hash(seed, v2, 3)
            np.testing.assert_array_equal(lhs, rhs)

    def test_matrix_form_agrees(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            n = int(rng.integers(1, 10))
            k = int(rng.integers(1, 5))
            v = rng.integers(0, 2, n)
            seed = rng.integers(0, 2, n + k - 1)
            mat = hash_matrix_for_input(v, k).matrix
            np.testing.assert_array_equal(mat @ seed % 2, toeplitz_hash(seed, v, k))


class TestPrivacyAmplify:
    def test_consistent_with_bit_pipeline(self):
        rng = np.random.default_rng(8)
        v = rng.integers(0, 4, 5)
        seed = rng.integers(0, 2, seed_length(5, 4, 3))
        direct = toeplitz_hash(seed, symbols_to_bits(v, 4), 3)
        np.testing.assert_array_equal(privacy_amplify(v, seed, 3, 4), direct)

    def test_zero_secret(self):
        assert privacy_amplify([1, 2], np.zeros(0), 0, 4).size == 0

    def test_output_budget(self):
        seed = np.zeros(seed_length(4, 2, 4), dtype=np.uint8)
        with pytest.raises(KTooLarge):
            privacy_amplify([0, 1, 0, 1], seed, 5, 2)
        with pytest.raises(DomainError):
            privacy_amplify([0, 1], np.zeros(3), -1, 2)

    def test_seed_size_enforced(self):
        with pytest.raises(DomainError):
            privacy_amplify([0, 1, 0, 1], np.zeros(3), 2, 2)


class TestTwoUniversality:
    def test_every_nonzero_difference_has_full_rank(self):
        """Deterministic universality: distinct inputs collide with
        probability exactly 2^-k because the difference map is onto.

        Collisions of (v1, v2) under a shared seed happen exactly when the
        hash of v1 xor v2 is zero, so full rank of every nonzero difference
        matrix pins the collision probability at 2^-k for all pairs.
        """
        k = 2
        for delta in itertools.product(range(2), repeat=8):
            if not any(delta):
                continue
            outputs, mass = hash_matrix_for_input(np.array(delta), k).image_distribution()
            assert outputs.shape == (4, k)
            assert mass == 0.25

    def test_monte_carlo_collision_rate(self):
        # N = 4 symbols over a 4-letter alphabet, k = 2: expect 1/4 collisions
        k = 2
        v1 = np.array([2, 1, 3, 0])
        v2 = np.array([2, 1, 3, 1])
        d = seed_length(4, 4, k)
        rng = np.random.default_rng(2024)
        seeds = rng.integers(0, 2, (10_000, d))
        hits = sum(
            np.array_equal(
                privacy_amplify(v1, s, k, 4), privacy_amplify(v2, s, k, 4)
            )
            for s in seeds
        )
        rate = hits / 10_000
        sigma = (0.25 * 0.75 / 10_000) ** 0.5
        assert abs(rate - 0.25) <= 3.0 * sigma


class TestImageDistribution:
    def test_rank_deficient_hand_case(self):
        mat = InputHashMatrix(np.array([[1, 0], [1, 0]], dtype=np.uint8))
        outputs, mass = mat.image_distribution()
        assert mass == 0.5
        assert sorted(map(tuple, outputs)) == [(0, 0), (1, 1)]

    def test_zero_matrix(self):
        mat = InputHashMatrix(np.zeros((3, 4), dtype=np.uint8))
        outputs, mass = mat.image_distribution()
        assert mass == 1.0
        np.testing.assert_array_equal(outputs, np.zeros((1, 3)))

    def test_matches_literal_seed_enumeration(self):
        rng = np.random.default_rng(10)
        for _ in range(25):
            k = int(rng.integers(1, 4))
            d = int(rng.integers(1, 9))
            mat = rng.integers(0, 2, (k, d)).astype(np.uint8)
            outputs, mass = InputHashMatrix(mat).image_distribution()

            seen = {}
            for seed in itertools.product(range(2), repeat=d):
                out = tuple(mat @ np.array(seed) % 2)
                seen[out] = seen.get(out, 0) + 1
            assert sorted(map(tuple, outputs)) == sorted(seen)
            # uniform on the image: every outcome covers the same seed count
            expected_count = mass * 2**d
            assert all(c == expected_count for c in seen.values())
