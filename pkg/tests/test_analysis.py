import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from commands.thp.analysis import (LOG2E, beta_sum, expected_interference, expected_log2_cos2,
                                   expected_log2_cos2_alternating, expected_neg_log2_interference,
                                   expected_neg_log2_sin2, feedback_scaling_th, feedback_scaling_zf,
                                   instantaneous_rates, interference_cdf, interference_pdf, kershaw_J_bound,
                                   neg_log_interference_digamma, rate_loss_terms, rate_loss_upper_bound,
                                   sin2_upper_bound, sum_rate_upper_bound, zf_rate_loss_upper_bound)
from commands.thp.errors import DomainError
from commands.thp.models import SystemParams


class TestInterferenceLaw:
    def test_density_example(self):
        assert interference_pdf(0.5, 4, 2) == pytest.approx(1.0, abs=1e-12)
        assert interference_pdf(0.25, 4, 2) == pytest.approx(1.5, abs=1e-12)

    @pytest.mark.parametrize("n_T, K", [(4, 2), (4, 3), (6, 4), (8, 2)])
    def test_density_normalized(self, n_T, K):
        total, _ = integrate.quad(lambda x: interference_pdf(x, n_T, K), 0.0, 1.0, epsabs=1e-12)
        assert total == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("n_T, K", [(4, 1), (4, 4)])
    def test_constant_cases(self, n_T, K):
        with pytest.raises(DomainError):
            interference_pdf(0.5, n_T, K)

    @pytest.mark.parametrize("x", [0.1, 0.4, 0.9])
    def test_cdf_matches_beta(self, x):
        assert interference_cdf(x, 6, 4) == pytest.approx(stats.beta(3, 2).cdf(x), abs=1e-12)

    @pytest.mark.parametrize("n_T, K, expected", [(4, 2, 1 / 3), (4, 1, 0.0), (4, 4, 1.0), (7, 4, 0.5)])
    def test_mean(self, n_T, K, expected):
        assert expected_interference(n_T, K) == pytest.approx(expected)


class TestLogMoment:
    @pytest.mark.parametrize("n_T, K, expected", [(4, 2, 2.16404), (4, 3, 0.72135), (4, 4, 0.0)])
    def test_examples(self, n_T, K, expected):
        assert expected_neg_log2_interference(n_T, K) == pytest.approx(expected, abs=1e-5)

    @pytest.mark.parametrize("n_T, K", [(4, 2), (5, 2), (6, 3), (10, 7), (16, 2), (24, 12), (30, 29)])
    def test_digamma_oracle(self, n_T, K):
        closed = expected_neg_log2_interference(n_T, K)
        assert closed == pytest.approx(LOG2E * neg_log_interference_digamma(n_T, K), rel=1e-10)

    def test_single_user(self):
        with pytest.raises(DomainError):
            expected_neg_log2_interference(4, 1)


class TestAngleTerm:
    def test_single_codeword(self):
        assert expected_log2_cos2(4, 1) == pytest.approx(-LOG2E * (1 + 1 / 2 + 1 / 3), abs=1e-12)

    @pytest.mark.parametrize("n_T", [2, 3, 4, 6])
    @pytest.mark.parametrize("n", [1, 2, 7, 16, 33, 64])
    def test_forms_agree(self, n_T, n):
        assert expected_log2_cos2_alternating(n_T, n) == pytest.approx(expected_log2_cos2(n_T, n), abs=1e-8)

    def test_magnitude_decreases(self):
        values = [abs(expected_log2_cos2(4, 2 ** B)) for B in range(0, 30)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_alternating_guard(self):
        with pytest.raises(DomainError):
            expected_log2_cos2_alternating(4, 257)

    def test_neg_log_sin2(self):
        assert expected_neg_log2_sin2(4, 16) == pytest.approx(LOG2E * 3.380728993 / 3, abs=1e-9)

    def test_cell_bound(self):
        assert sin2_upper_bound(4, 3) == pytest.approx(0.5)


class TestRateLossBound:
    def test_c_constant(self):
        params = SystemParams(n_T=4, K=4, M=4)
        assert params.kappa == pytest.approx(16 / 3)
        assert params.c == pytest.approx(0.75)

    def test_single_user_only_angle_term(self):
        params = SystemParams(n_T=4, K=1, M=4, B=6, P_dB=30.0)
        interference, angle = rate_loss_terms(params)
        assert interference == 0.0
        assert rate_loss_upper_bound(params) == pytest.approx(angle)

    def test_independent_evaluation(self):
        params = SystemParams(n_T=4, K=4, M=4, B=10, P_dB=25.0)
        P = 10.0 ** 2.5
        interference = math.log2(1.0 + 0.75 * P * 2.0 ** (-10 / 3))
        angle = LOG2E / 3 * sum(special.beta(1024, i / 3) for i in (1, 2, 3))
        assert rate_loss_upper_bound(params) == pytest.approx(interference + angle, rel=1e-6)

    def test_zf_bound(self):
        assert zf_rate_loss_upper_bound(4, 8.0, 3) == pytest.approx(math.log2(5.0))


class TestRateCeiling:
    def test_full_load(self):
        assert sum_rate_upper_bound(4, 4, 4) == pytest.approx(1.6258, abs=1e-4)

    def test_partial_load(self):
        assert sum_rate_upper_bound(4, 2, 4) == pytest.approx(1.6258 + 2.16404, abs=2e-4)

    def test_increasing_in_bits(self):
        values = [sum_rate_upper_bound(4, 4, B) for B in range(0, 20)]
        assert all(a < b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("n_T", [1, 4])
    def test_single_user_unbounded(self, n_T):
        assert sum_rate_upper_bound(n_T, 1, 4) == math.inf


class TestFeedbackScaling:
    @pytest.mark.parametrize("P_dB", [0.0, 10.0, 27.5])
    def test_zf_b2(self, P_dB):
        assert feedback_scaling_zf(4, P_dB, 2.0) == pytest.approx(3 * P_dB * math.log2(10) / 10)

    def test_zf_example(self):
        assert feedback_scaling_zf(4, 20.0, 3.0) == pytest.approx(16.93, abs=0.01)

    def test_zf_linear(self):
        slope = feedback_scaling_zf(4, 21.0, 3.0) - feedback_scaling_zf(4, 20.0, 3.0)
        assert slope == pytest.approx(3 * 0.33219, abs=1e-4)

    def test_zf_domain(self):
        with pytest.raises(DomainError):
            feedback_scaling_zf(4, 20.0, 1.0)

    def test_th_example(self):
        params = SystemParams(n_T=4, K=4, M=4)
        assert feedback_scaling_th(params, 20.0, 3.0, 0.0) == pytest.approx(19.52, abs=0.01)

    def test_th_infeasible(self):
        with pytest.raises(DomainError):
            feedback_scaling_th(SystemParams(n_T=4, K=4, M=4), 20.0, 2.0, 0.0)

    def test_th_single_user(self):
        with pytest.raises(DomainError):
            feedback_scaling_th(SystemParams(n_T=4, K=1, M=4), 20.0, 3.0, 0.0)

    def test_th_monotone_in_b(self):
        params = SystemParams(n_T=4, K=4, M=4)
        assert feedback_scaling_th(params, 20.0, 4.0, 0.0) < feedback_scaling_th(params, 20.0, 3.0, 0.0)


class TestKershaw:
    def test_example(self):
        expected = (math.gamma(1 / 3) * 15.5 ** (-1 / 3) + math.gamma(2 / 3) * 15.5 ** (-2 / 3)
                    + 15.5 ** -1)
        assert kershaw_J_bound(4, 16) == pytest.approx(expected, rel=1e-12)

    def test_dominates_and_decreases(self):
        bounds = np.array([kershaw_J_bound(4, n) for n in range(1, 1025)])
        exact = np.array([beta_sum(4, n) for n in range(1, 1025)])
        assert np.all(bounds > exact)
        assert np.all(np.diff(bounds) < 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            kershaw_J_bound(4, 0)


def test_instantaneous_rates():
    assert np.allclose(instantaneous_rates([0.0, 1.0, 3.0]), [0.0, 1.0, 2.0])


@pytest.mark.parametrize("kwargs", [dict(n_T=2, K=3), dict(n_T=4, K=2, M=8), dict(n_T=4, K=2, B=-1)])
def test_system_params_validation(kwargs):
    with pytest.raises(DomainError):
        SystemParams(**kwargs)
