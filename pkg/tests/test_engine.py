from dataclasses import replace

import numpy as np
import pytest

from commands.thp.analysis import rate_loss_upper_bound, zf_rate_loss_upper_bound
from commands.thp.engine import (TH_LOSS, TH_LOSS_BOUND, ZF_LOSS, ZF_LOSS_BOUND, aggregate, curve,
                                 measure_db_gap, resolve_quantizer, run_rate_loss, run_scaled_feedback,
                                 run_sweep, scaled_bits, scaled_feedback_gaps, simulate_trials, trial_rng)
from commands.thp.errors import ConfigError, DomainError
from commands.thp.factory import SchemeFactory
from commands.thp.figures import scaled_feedback_records, scaled_feedback_summary, scaled_scheme_name
from commands.thp.models import (AGGREGATE_USER_INDEX, NO_FEEDBACK_BITS, TH_PERFECT, TH_QUANTIZED,
                                 ZF_PERFECT, ZF_QUANTIZED)
from commands.thp.schemes import THPerfectScheme


class TestSeeding:
    def test_streams_independent_of_order(self):
        first = trial_rng(7, 3, 0).standard_normal(4)
        trial_rng(7, 2, 0).standard_normal(100)
        assert np.array_equal(first, trial_rng(7, 3, 0).standard_normal(4))

    def test_streams_differ(self):
        assert not np.array_equal(trial_rng(7, 3, 0).random(4), trial_rng(7, 3, 1).random(4))
        assert not np.array_equal(trial_rng(7, 3, 1, 4, 0).random(4), trial_rng(7, 3, 1, 4, 1).random(4))


class TestQuantizerChoice:
    def test_auto(self, small_config):
        assert resolve_quantizer(small_config, 16) == 'codebook'
        assert resolve_quantizer(small_config, 17) == 'sampled'

    def test_forced(self, small_config):
        assert resolve_quantizer(replace(small_config, quantizer='genie'), 4) == 'genie'


class TestSweep:
    def test_record_layout(self, small_config):
        records = run_sweep(small_config)
        L, K = len(small_config.snr_grid), small_config.K
        assert len(records) == 2 * L * (K + 1) + 2 * len(small_config.bits_grid) * L * (K + 1)
        perfect = [r for r in records if r.scheme in (TH_PERFECT, ZF_PERFECT)]
        assert {r.B for r in perfect} == {NO_FEEDBACK_BITS}
        assert {r.user_index for r in records} == {AGGREGATE_USER_INDEX, 0, 1, 2, 3}
        assert all(r.trials == small_config.trials for r in records)
        assert all(r.mean_rate >= 0 and r.stderr >= 0 for r in records)

    def test_aggregate_row_is_user_mean(self, small_config):
        records = run_sweep(replace(small_config, schemes=(TH_PERFECT,)))
        rows = [r for r in records if r.P_dB == 20.0]
        per_user = [r.mean_rate for r in rows if r.user_index != AGGREGATE_USER_INDEX]
        across = [r for r in rows if r.user_index == AGGREGATE_USER_INDEX][0]
        assert across.mean_rate == pytest.approx(np.mean(per_user), rel=1e-12)

    def test_deterministic_across_workers(self, small_config):
        config = replace(small_config, trials=600)
        serial = run_sweep(config)
        parallel = run_sweep(replace(config, workers=4))
        assert serial == parallel

    def test_rates_increase_with_snr(self, small_config):
        records = run_sweep(replace(small_config, schemes=(TH_PERFECT, ZF_PERFECT)))
        for scheme in (TH_PERFECT, ZF_PERFECT):
            rates = [r.mean_rate for r in curve(records, scheme)]
            assert rates == sorted(rates)

    def test_genie_matches_perfect(self, small_config):
        config = replace(small_config, quantizer='genie')
        sweep = simulate_trials(config)
        for perfect, quantized in ((TH_PERFECT, TH_QUANTIZED), (ZF_PERFECT, ZF_QUANTIZED)):
            for B in config.bits_grid:
                assert np.allclose(sweep.rates[(perfect, NO_FEEDBACK_BITS)], sweep.rates[(quantized, B)],
                                   rtol=0, atol=1e-8)

    def test_stderr_shrinks_with_trials(self, small_config):
        base = replace(small_config, schemes=(TH_PERFECT,), snr_grid=(10.0,), trials=500)
        small = curve(run_sweep(base), TH_PERFECT)[0].stderr
        large = curve(run_sweep(replace(base, trials=2000)), TH_PERFECT)[0].stderr
        assert small / large == pytest.approx(2.0, rel=0.3)

    def test_fixed_feedback_saturates(self, small_config):
        config = replace(small_config, schemes=(TH_QUANTIZED,), snr_grid=(30.0, 40.0), bits_grid=(4,),
                         trials=1000)
        rates = [r.mean_rate for r in curve(run_sweep(config), TH_QUANTIZED)]
        assert abs(rates[1] - rates[0]) < 0.15

    def test_collision_resamples_are_rare(self, small_config):
        config = replace(small_config, K=2, schemes=(TH_QUANTIZED,), snr_grid=(20.0,), bits_grid=(8,),
                         quantizer='codebook', trials=2000)
        sweep = simulate_trials(config)
        assert sweep.resampled(8) / config.trials < 10 * 2.0 ** (-8 * (config.K - 1))

    def test_small_codebook_is_logged(self, small_config, package_log):
        simulate_trials(replace(small_config, schemes=(TH_QUANTIZED,), bits_grid=(3, 8)))
        messages = [r.getMessage() for r in package_log.records]
        assert any('B [3] gives fewer than K^2=16 codewords' in m for m in messages)

    def test_per_user_codebooks_not_logged(self, small_config, package_log):
        simulate_trials(replace(small_config, schemes=(TH_QUANTIZED,), bits_grid=(3,), per_user_codebooks=True))
        assert not any('codewords' in r.getMessage() for r in package_log.records)

    def test_sampled_quantizer_runs(self, small_config):
        config = replace(small_config, schemes=(TH_QUANTIZED,), bits_grid=(20,))
        records = run_sweep(config)
        assert {r.B for r in records} == {20}


class TestAggregate:
    def test_rows(self):
        samples = np.array([[1.0, 3.0], [3.0, 5.0]])
        records = aggregate('th_perfect', 10.0, NO_FEEDBACK_BITS, samples, resampled=2)
        assert [r.user_index for r in records] == [0, 1, AGGREGATE_USER_INDEX]
        assert [r.mean_rate for r in records] == [2.0, 4.0, 3.0]
        assert records[0].stderr == pytest.approx(1.0)
        assert all(r.resampled == 2 and r.trials == 2 for r in records)


class TestRateLoss:
    def test_rows(self, small_config):
        config = replace(small_config, snr_grid=(25.0,), bits_grid=(4, 12), trials=200)
        records = run_rate_loss(config)
        schemes = {r.scheme for r in records}
        assert schemes == {TH_LOSS, ZF_LOSS, TH_LOSS_BOUND, ZF_LOSS_BOUND}
        bounds = {(r.scheme, r.B): r.mean_rate for r in records if r.scheme.endswith('_bound')}
        params = config.params(B=4, P_dB=25.0)
        assert bounds[(TH_LOSS_BOUND, 4)] == pytest.approx(rate_loss_upper_bound(params))
        assert bounds[(ZF_LOSS_BOUND, 12)] == pytest.approx(zf_rate_loss_upper_bound(4, params.P, 12))

    def test_loss_shrinks_with_bits(self, small_config):
        config = replace(small_config, snr_grid=(25.0,), bits_grid=(4, 12), trials=300)
        records = run_rate_loss(config)
        for scheme in (TH_LOSS, ZF_LOSS):
            coarse = curve(records, scheme, B=4)[0].mean_rate
            fine = curve(records, scheme, B=12)[0].mean_rate
            assert fine < coarse


class TestScaledFeedback:
    def test_bits(self, small_config):
        params = small_config.params()
        assert scaled_bits(params, 20.0, 3.0, 0.0) == 20
        assert scaled_bits(params, 0.0, 3.0, 0.0) == 0

    def test_infeasible(self, small_config):
        with pytest.raises(DomainError):
            scaled_bits(small_config.params(), 20.0, 2.0, 0.0)

    def test_requires_scaling(self, small_config):
        with pytest.raises(ConfigError):
            run_scaled_feedback(small_config)

    def test_structure(self, small_config):
        config = replace(small_config, snr_grid=(0.0, 5.0, 10.0), scaling=(3.0, 0.0), trials=60)
        records = run_scaled_feedback(config)
        quantized = curve(records, TH_QUANTIZED)
        assert [r.P_dB for r in quantized] == [0.0, 5.0, 10.0]
        assert [r.B for r in quantized] == [scaled_bits(config.params(), p, 3.0, 0.0) for p in (0.0, 5.0, 10.0)]
        assert len(curve(records, TH_PERFECT)) == 3

    def test_gaps(self, small_config):
        grid = (10.0, 20.0, 30.0)
        config = replace(small_config, snr_grid=grid, bits_grid=(0,), schemes=(TH_PERFECT, TH_QUANTIZED),
                         scaling=(4.0, 0.0))
        db_gaps, bit_gaps, errors = scaled_feedback_gaps(run_scaled_feedback(config), grid)
        assert db_gaps.shape == bit_gaps.shape == errors.shape == (3,)
        assert np.all(errors > 0)

    def test_fig2_logs_gaps(self, small_config, package_log):
        grid = (10.0, 20.0, 30.0)
        config = replace(small_config, snr_grid=grid, bits_grid=(0,), scaling=(3.0, 0.0), trials=60)
        records = scaled_feedback_records(config)
        summary = scaled_feedback_summary(records, grid)
        assert sorted(summary) == [3.0, 4.0]
        for b, (db_gap, bit_gap) in summary.items():
            _, bit_gaps, _ = scaled_feedback_gaps(records, grid, scaled_scheme_name(b))
            assert bit_gap == pytest.approx(bit_gaps[-1])
        messages = [r.getMessage() for r in package_log.records]
        assert any(m.startswith('scaled feedback b=3 at 30 dB: gap') for m in messages)
        assert any('target log2 b = 2.000 bits' in m for m in messages)


class TestDbGap:
    def test_linear_curves(self):
        grid = [0.0, 10.0, 20.0, 30.0]
        perfect = [1.0, 2.0, 3.0, 4.0]
        quantized = [0.6, 1.5, 2.5, 3.5]
        gap = measure_db_gap(grid, perfect, quantized)
        assert np.isnan(gap[0])
        assert np.allclose(gap[1:], [5.0, 5.0, 5.0])

    def test_identical_curves(self):
        grid = [0.0, 10.0, 20.0]
        assert np.allclose(measure_db_gap(grid, [1.0, 2.0, 3.0], [1.0, 2.0, 3.0]), 0.0)


class TestFactory:
    def test_known(self):
        scheme = SchemeFactory.get_scheme(TH_PERFECT)
        assert isinstance(scheme, THPerfectScheme)
        assert not scheme.uses_feedback
        assert SchemeFactory.get_scheme(ZF_QUANTIZED).uses_feedback

    def test_unknown(self):
        with pytest.raises(ConfigError):
            SchemeFactory.get_scheme('dirty_paper')

    def test_names(self):
        assert set(SchemeFactory.names()) >= {TH_PERFECT, TH_QUANTIZED, ZF_PERFECT, ZF_QUANTIZED}
