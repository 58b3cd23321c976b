import numpy as np
import pytest

from commands.thp import validation
from commands.thp.analysis import interference_cdf
from commands.thp.models import CheckResult, Constellation
from commands.thp.validation import (ValidationSettings, check_angle_term, check_interference_law,
                                     check_interference_log_moment, check_kershaw, check_loopback,
                                     check_signal_model, interference_samples, loopback_residual,
                                     power_ratio_deviation, run_validation)
from commands.thp.stats import ks_critical_value, ks_statistic


@pytest.fixture
def quick():
    return ValidationSettings(seed=3, loopback_trials=40, ks_samples=300, moment_samples=300,
                              rate_trials=40, scaled_trials=40)


class TestChecks:
    def test_loopback_exact(self, quick, qam4):
        worst, errors = loopback_residual(4, 3, 50, np.random.default_rng(1), qam4)
        assert worst < 1e-9 and errors == 0
        results = check_loopback(quick)
        assert all(r.passed for r in results)
        assert [r.name for r in results][0] == 'loopback_nt2_k1'

    def test_kershaw(self, quick):
        assert all(r.passed for r in check_kershaw(quick))

    def test_log_moment_closed_forms(self, quick):
        results = {r.name: r for r in check_interference_log_moment(quick)}
        digamma_rows = [r for name, r in results.items() if name.startswith('log_moment_digamma')]
        assert len(digamma_rows) == 4
        assert all(r.passed for r in digamma_rows)

    def test_angle_closed_forms(self, quick):
        results = check_angle_term(quick)
        for r in results:
            if r.name.startswith(('angle_forms_agree', 'rvq_mean_below_cell_bound')):
                assert r.passed, r.name

    def test_full_load_interference(self, quick):
        results = {r.name: r for r in check_interference_law(quick)}
        assert results['interference_full_load_is_one'].passed
        assert 'interference_beta_ks_nt4_k2' in results

    def test_signal_model(self, quick):
        results = {r.name: r for r in check_signal_model(quick)}
        assert results['quantized_signal_model'].passed
        assert results['transmit_power_perfect'].passed
        assert 'expected 0.9375' in results['transmit_power_quantized'].detail

    def test_power_deviation_is_two_sided(self):
        deviation, allowed = power_ratio_deviation(np.full(100, 1.0), 0.9375)
        assert deviation == pytest.approx(1.0 / 0.9375 - 1.0)
        assert deviation > allowed
        deviation, allowed = power_ratio_deviation(np.full(100, 0.8), 0.9375)
        assert deviation > allowed
        deviation, allowed = power_ratio_deviation(np.full(100, 0.93), 0.9375)
        assert deviation <= allowed


class TestHelpers:
    def test_interference_samples_range(self):
        eps = interference_samples(4, 2, 200, np.random.default_rng(5), Constellation.from_order(4))
        assert eps.shape == (200, 2)
        assert np.all((eps >= 0) & (eps <= 1 + 1e-12))

    def test_interference_samples_search_codebooks(self, monkeypatch):
        def unavailable(*args, **kwargs):
            raise AssertionError('outcome sampler used')

        monkeypatch.setattr(validation, 'sample_quantized_users', unavailable)
        eps = interference_samples(4, 2, 2000, np.random.default_rng(11), Constellation.from_order(4))
        cdf = np.vectorize(lambda x: interference_cdf(x, 4, 2))
        assert ks_statistic(eps[:, 0], cdf) < ks_critical_value(2000, 0.01)

    def test_permuted_samples_same_shape(self):
        eps = interference_samples(6, 4, 50, np.random.default_rng(5), Constellation.from_order(4), permute=True)
        assert eps.shape == (50, 4)


class TestSuite:
    def test_failures_become_rows(self, quick, monkeypatch):
        def broken(settings):
            raise RuntimeError('boom')

        monkeypatch.setattr(validation, 'SUITE', (check_kershaw, broken))
        results = run_validation(quick)
        assert [r.passed for r in results] == [True, True, False]
        assert results[-1].name == 'broken'
        assert results[-1].verdict == 'fail'
        assert 'boom' in results[-1].detail

    def test_full_suite_shape(self, quick):
        results = run_validation(quick)
        assert all(isinstance(r, CheckResult) for r in results)
        names = [r.name for r in results]
        assert len(names) == len(set(names))
        assert not any(name.startswith('scaled_') for name in names)
