import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from commands.thp.errors import DomainError
from commands.thp.models import ChannelSet, Codebook
from commands.thp.numerics import sample_complex_gaussian, sample_unit_sphere
from commands.thp.quantization import (codebooks_for_users, decompose, expected_sin2_rvq, generate_rvq,
                                       genie_codebook, quantization_error_samples, quantization_error_stats,
                                       quantize, quantize_users, sample_quantized_users, sample_rvq_outcome)
from commands.thp.stats import ks_critical_value, ks_two_sample


class TestCodebook:
    @pytest.mark.parametrize("B, size", [(0, 1), (4, 16)])
    def test_size_and_norms(self, rng, B, size):
        codebook = generate_rvq(rng, B, 4)
        assert codebook.size == size
        assert codebook.n_T == 4
        assert np.allclose(np.linalg.norm(codebook.W, axis=1), 1.0, atol=1e-12)

    def test_deterministic(self):
        first = generate_rvq(np.random.default_rng(11), 5, 4)
        second = generate_rvq(np.random.default_rng(11), 5, 4)
        assert np.array_equal(first.W, second.W)

    @pytest.mark.parametrize("B, n_T, max_bits", [(-1, 4, 24), (2.5, 4, 24), (3, 1, 24), (9, 4, 8)])
    def test_bad_arguments(self, rng, B, n_T, max_bits):
        with pytest.raises(DomainError):
            generate_rvq(rng, B, n_T, max_bits=max_bits)

    def test_shared_and_per_user(self, rng):
        shared = codebooks_for_users(rng, 4, 4, 3)
        assert len(shared) == 3 and shared[0] is shared[2]
        per_user = codebooks_for_users(rng, 4, 4, 3, per_user=True)
        assert not np.array_equal(per_user[0].W, per_user[1].W)

    def test_small_codebooks_not_shared(self, rng):
        codebooks = codebooks_for_users(rng, 3, 4, 3)
        assert codebooks[0] is not codebooks[1]


class TestQuantize:
    def test_exact_codeword(self, rng):
        codebook = generate_rvq(rng, 3, 4)
        hbar = codebook.W[5] * np.exp(0.7j)
        assert quantize(hbar, codebook) == 5
        entry = decompose(hbar, codebook.W[5])
        assert entry.cos2 == pytest.approx(1.0, abs=1e-12)

    def test_single_codeword(self, rng):
        codebook = generate_rvq(rng, 0, 4)
        assert quantize(sample_unit_sphere(rng, 4), codebook) == 0

    def test_empty_codebook(self):
        with pytest.raises(DomainError):
            quantize(np.ones(2) / np.sqrt(2), Codebook(B=0, W=np.zeros((0, 2), dtype=complex)))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1))
    def test_maximality(self, seed):
        rng = np.random.default_rng(seed)
        codebook = generate_rvq(rng, 6, 4)
        hbar = sample_unit_sphere(rng, 4)
        gains = [abs(np.vdot(w, hbar)) ** 2 for w in codebook.W]
        index = quantize(hbar, codebook)
        assert index == int(np.argmax(gains))
        assert all(gains[index] >= g for g in gains)

    def test_ties_pick_lowest_index(self):
        hbar = np.array([1.0, 0.0], dtype=complex)
        W = np.array([[0.0, 1.0], [1.0, 0.0], [1.0, 0.0]], dtype=complex)
        assert quantize(hbar, Codebook(B=2, W=W)) == 1


class TestDecompose:
    def test_identical(self, rng):
        hbar = sample_unit_sphere(rng, 4)
        entry = decompose(hbar, hbar)
        assert entry.cos2 == pytest.approx(1.0, abs=1e-12)
        assert entry.sin2 == pytest.approx(0.0, abs=1e-12)
        assert entry.exact
        assert np.linalg.norm(entry.htilde) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.vdot(hbar, entry.htilde)) <= 1e-10

    def test_orthogonal(self):
        hbar = np.array([1.0, 0.0, 0.0], dtype=complex)
        hhat = np.array([0.0, 1.0j, 0.0], dtype=complex)
        entry = decompose(hbar, hhat)
        assert entry.cos2 == pytest.approx(0.0, abs=1e-15)
        assert entry.sin2 == pytest.approx(1.0, abs=1e-15)
        assert abs(abs(np.vdot(entry.htilde, hbar)) - 1.0) <= 1e-12

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n_T=st.integers(2, 6))
    def test_reconstruction(self, seed, n_T):
        rng = np.random.default_rng(seed)
        hbar, hhat = sample_unit_sphere(rng, n_T), sample_unit_sphere(rng, n_T)
        entry = decompose(hbar, hhat)
        assert entry.cos2 + entry.sin2 == pytest.approx(1.0, abs=1e-15)
        assert np.linalg.norm(entry.htilde) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.vdot(hhat, entry.htilde)) <= 1e-10
        rebuilt = entry.c * hhat + np.sqrt(entry.sin2) * entry.htilde
        assert np.allclose(rebuilt, hbar, atol=1e-10)


class TestUsers:
    def test_quantize_users_shared(self, rng):
        channels = ChannelSet.from_matrix(sample_complex_gaussian(rng, 3, 4))
        codebook = generate_rvq(rng, 4, 4)
        qcsi = quantize_users(channels, [codebook] * 3)
        assert qcsi.K == 3
        for k in range(3):
            assert np.array_equal(qcsi.hhat[k], codebook.W[qcsi.index[k]])
        assert np.allclose(qcsi.cos2 + qcsi.sin2, 1.0)

    def test_collisions_counted(self):
        H = np.array([[1.0, 0.1], [2.0, 0.2]], dtype=complex)
        W = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
        qcsi = quantize_users(ChannelSet.from_matrix(H), [Codebook(B=1, W=W)] * 2)
        assert qcsi.collisions == 1

    def test_codebook_count_mismatch(self, rng):
        channels = ChannelSet.from_matrix(sample_complex_gaussian(rng, 3, 4))
        with pytest.raises(DomainError):
            quantize_users(channels, [generate_rvq(rng, 2, 4)])

    def test_genie_is_exact(self, rng):
        channels = ChannelSet.from_matrix(sample_complex_gaussian(rng, 4, 4))
        qcsi = quantize_users(channels, [genie_codebook(channels)] * 4)
        assert np.array_equal(qcsi.index, np.arange(4))
        assert np.allclose(qcsi.sin2, 0.0, atol=1e-12)
        assert np.all(qcsi.exact)

    def test_sampled_users(self, rng):
        channels = ChannelSet.from_matrix(sample_complex_gaussian(rng, 3, 4))
        qcsi = sample_quantized_users(rng, channels, 40)
        assert np.all(qcsi.index == -1)
        assert qcsi.collisions == 0
        assert np.allclose(np.linalg.norm(qcsi.hhat, axis=1), 1.0, atol=1e-12)
        # mean error near 2^(-40/3)
        assert np.all(qcsi.sin2 < 1e-2)


class TestQuantizationError:
    def test_single_codeword_two_antennas(self, rng):
        assert quantization_error_stats(2, 0, 20000, rng) == pytest.approx(0.5, abs=0.01)

    @pytest.mark.parametrize("n_T, B", [(2, 2), (3, 3), (4, 4), (5, 2)])
    def test_below_cell_bound(self, rng, n_T, B):
        samples = quantization_error_samples(n_T, B, 5000, rng)
        sigma = samples.std(ddof=1) / np.sqrt(samples.size)
        assert samples.mean() <= 2.0 ** (-B / (n_T - 1)) + 3 * sigma

    def test_order_tight(self, rng):
        delta = 2.0 ** (-8 / 3)
        mean = quantization_error_stats(4, 8, 4000, rng)
        assert 0.5 * delta <= mean <= delta

    def test_decreasing_in_bits(self, rng):
        means = [quantization_error_samples(4, B, 10000, rng).mean() for B in (2, 4, 6)]
        assert means[0] > means[1] > means[2]

    @pytest.mark.parametrize("n_T", [2, 3, 4, 8])
    def test_expected_single_codeword(self, n_T):
        assert expected_sin2_rvq(n_T, 1) == pytest.approx((n_T - 1) / n_T, rel=1e-12)

    @pytest.mark.parametrize("B", [2, 5])
    def test_expected_matches_monte_carlo(self, rng, B):
        mean = quantization_error_stats(4, B, 20000, rng)
        assert mean == pytest.approx(expected_sin2_rvq(4, 2 ** B), rel=0.03)

    def test_sampled_outcome_matches_search(self, rng):
        n = 3000
        genuine = quantization_error_samples(4, 4, n, rng)
        hbar = sample_unit_sphere(rng, 4)
        sampled = np.array([1.0 - abs(np.vdot(sample_rvq_outcome(rng, hbar, 4), hbar)) ** 2 for _ in range(n)])
        assert ks_two_sample(genuine, sampled) < ks_critical_value(n, m=n)

    def test_sampled_outcome_is_unit(self, rng):
        hbar = sample_unit_sphere(rng, 4)
        assert np.linalg.norm(sample_rvq_outcome(rng, hbar, 12)) == pytest.approx(1.0, abs=1e-12)
