"""
validation suite

every check compares a simulated statistic with its closed form and yields
a CheckResult; a failing check is a report row, never an exception
"""
import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import stats as scipy_stats

from .analysis import (LOG2E, beta_sum, expected_log2_cos2, expected_log2_cos2_alternating,
                       expected_neg_log2_interference, interference_cdf, kershaw_J_bound,
                       neg_log_interference_digamma, rate_loss_upper_bound, sin2_upper_bound,
                       sum_rate_upper_bound, zf_rate_loss_upper_bound)
from .channel import draw_channels
from .engine import (TH_LOSS, ZF_LOSS, curve, run_rate_loss, run_scaled_feedback, run_sweep,
                     scaled_feedback_gaps)
from .errors import DegenerateChannelError
from .log import sim_logger_handler
from .models import (ALL_SCHEMES, TH_PERFECT, TH_QUANTIZED, CheckResult, Constellation,
                     ExperimentConfig, QuantizedCSI)
from .precoding import (build_perfect, build_quantized, expected_power_ratio, interference_gains, interference_term,
                        mod_tau, raw_interference_gain, transmit_frame)
from .quantization import (codebooks_for_users, expected_sin2_rvq, quantization_error_samples, quantize_users,
                           sample_quantized_users, sample_rvq_outcome)
from .stats import ks_critical_value, ks_statistic, ks_two_sample, standard_error

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

LOOPBACK_SYSTEMS = ((2, 1), (2, 2), (4, 2), (4, 3), (4, 4))
BETA_SYSTEMS = ((4, 2), (4, 3), (6, 4))
LOOPBACK_TOLERANCE = 1e-9
SIGNAL_MODEL_TOLERANCE = 1e-9
# relative slack on the mean transmit power; x_2, x_3 fall short of the uniform energy
POWER_TOLERANCE = 0.04
FORMS_TOLERANCE = 1e-8
FULL_LOAD_TOLERANCE = 1e-10
KS_ALPHA = 0.01
# bits used when only the quantization outcome matters
EPS_SAMPLING_BITS = 6
CELL_BOUND_BITS = (1, 2, 4, 8, 12, 16)


@dataclass(frozen=True)
class ValidationSettings:
    """sample sizes of the suite; the defaults are the full-scale run"""
    seed: int = 42
    M: int = 4
    loopback_trials: int = 10000
    ks_samples: int = 20000
    moment_samples: int = 100000
    rate_trials: int = 10000
    workers: int = 1
    include_scaled: bool = False
    scaled_trials: int = 2000


def _check(name: str, statistic: float, threshold: float, passed: bool, detail: str = '') -> CheckResult:
    result = CheckResult(name=name, statistic=float(statistic), threshold=float(threshold),
                         passed=bool(passed), detail=detail)
    log = logger.info if result.passed else logger.warning
    log(f"check {name}: statistic {result.statistic:.6g}, threshold {result.threshold:.6g}, {result.verdict}")
    return result


def _rng(settings: ValidationSettings, *stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([settings.seed, *stream]))


def loopback_residual(n_T: int, K: int, trials: int, rng: np.random.Generator,
                      constellation: Constellation) -> Tuple[float, int]:
    """
    noise-free perfect-CSI chain

    return:
        (largest |MOD(y) - s| seen, number of symbol errors after detection)
    """
    worst, errors = 0.0, 0
    for _ in range(trials):
        channels = draw_channels(rng, n_T, K)
        precoder = build_perfect(channels, constellation, 1.0)
        frame = transmit_frame(channels, precoder, constellation, constellation.draw(rng, K), 1.0)
        worst = max(worst, float(np.max(np.abs(mod_tau(frame.y, constellation.tau) - frame.s))))
        errors += frame.symbol_errors
    return worst, errors


def permute_csi(qcsi: QuantizedCSI, order) -> QuantizedCSI:
    """same quantized users in another precoding order"""
    order = np.asarray(order, dtype=int)
    return replace(qcsi, index=qcsi.index[order], hhat=qcsi.hhat[order], c=qcsi.c[order],
                   cos2=qcsi.cos2[order], sin2=qcsi.sin2[order], htilde=qcsi.htilde[order],
                   exact=qcsi.exact[order])


def interference_samples(n_T: int, K: int, samples: int, rng: np.random.Generator,
                         constellation: Constellation, permute: bool = False) -> np.ndarray:
    """
    eps_k = ||htilde_k Qhat^H||^2 from the quantized precoder, with every
    user searching its own RVQ codebook of EPS_SAMPLING_BITS bits

    params:
        permute: re-order the users at random before factorizing and report
            eps in the original user order

    return:
        (samples, K) array
    """
    out = np.empty((samples, K))
    filled = 0
    while filled < samples:
        channels = draw_channels(rng, n_T, K)
        qcsi = quantize_users(channels, codebooks_for_users(rng, EPS_SAMPLING_BITS, n_T, K, per_user=True))
        order = rng.permutation(K) if permute else np.arange(K)
        try:
            precoder = build_quantized(channels.permuted(order), permute_csi(qcsi, order), constellation, 1.0)
        except DegenerateChannelError:
            continue
        eps = np.empty(K)
        eps[order] = interference_gains(permute_csi(qcsi, order), precoder)
        out[filled] = eps
        filled += 1
    return out


def check_loopback(settings: ValidationSettings) -> List[CheckResult]:
    constellation = Constellation.from_order(settings.M)
    results = []
    for index, (n_T, K) in enumerate(LOOPBACK_SYSTEMS):
        worst, errors = loopback_residual(n_T, K, settings.loopback_trials, _rng(settings, 1, index), constellation)
        results.append(_check(f"loopback_nt{n_T}_k{K}", worst, LOOPBACK_TOLERANCE,
                              worst <= LOOPBACK_TOLERANCE and errors == 0, f"{errors} symbol errors"))
    return results


def check_interference_law(settings: ValidationSettings) -> List[CheckResult]:
    constellation = Constellation.from_order(settings.M)
    n = settings.ks_samples
    critical = ks_critical_value(n, KS_ALPHA)
    critical_two = ks_critical_value(n, KS_ALPHA, m=n)
    results = []
    for index, (n_T, K) in enumerate(BETA_SYSTEMS):
        eps = interference_samples(n_T, K, n, _rng(settings, 2, index), constellation)
        cdf = np.vectorize(lambda x: interference_cdf(x, n_T, K))
        statistic = ks_statistic(eps[:, 0], cdf)
        results.append(_check(f"interference_beta_ks_nt{n_T}_k{K}", statistic, critical, statistic < critical))
        statistic = ks_two_sample(eps[:, 0], eps[:, K - 1])
        results.append(_check(f"interference_first_vs_last_nt{n_T}_k{K}", statistic, critical_two,
                              statistic < critical_two))
        permuted = interference_samples(n_T, K, n, _rng(settings, 3, index), constellation, permute=True)
        statistic = ks_two_sample(eps[:, 0], permuted[:, 0])
        results.append(_check(f"interference_permutation_nt{n_T}_k{K}", statistic, critical_two,
                              statistic < critical_two))

    # K = n_T: Qhat is square unitary, eps is one exactly
    rng = _rng(settings, 4)
    worst = 0.0
    for _ in range(min(n, 2000)):
        channels = draw_channels(rng, 4, 4)
        qcsi = sample_quantized_users(rng, channels, EPS_SAMPLING_BITS)
        precoder = build_quantized(channels, qcsi, constellation, 1.0)
        worst = max(worst, float(np.max(np.abs(raw_interference_gain(qcsi, precoder) - 1.0))))
    results.append(_check("interference_full_load_is_one", worst, FULL_LOAD_TOLERANCE,
                          worst <= FULL_LOAD_TOLERANCE))
    return results


def check_interference_log_moment(settings: ValidationSettings) -> List[CheckResult]:
    constellation = Constellation.from_order(settings.M)
    results = []
    for n_T, K in ((4, 2), (6, 3), (8, 5), (12, 4)):
        closed = expected_neg_log2_interference(n_T, K)
        oracle = LOG2E * neg_log_interference_digamma(n_T, K)
        results.append(_check(f"log_moment_digamma_nt{n_T}_k{K}", abs(closed - oracle), 1e-9,
                              abs(closed - oracle) <= 1e-9))
    for index, (n_T, K) in enumerate(((4, 2), (4, 3))):
        eps = interference_samples(n_T, K, settings.moment_samples, _rng(settings, 5, index), constellation)
        empirical = float(np.mean(-np.log2(eps[:, 0])))
        closed = expected_neg_log2_interference(n_T, K)
        relative = abs(empirical - closed) / closed
        results.append(_check(f"log_moment_mc_nt{n_T}_k{K}", relative, 0.01, relative < 0.01,
                              f"empirical {empirical:.5f} closed {closed:.5f}"))
    return results


def check_angle_term(settings: ValidationSettings) -> List[CheckResult]:
    results = []
    for n_T in (2, 3, 4, 6):
        worst = max(abs(expected_log2_cos2_alternating(n_T, n) - expected_log2_cos2(n_T, n))
                    for n in range(1, 65))
        results.append(_check(f"angle_forms_agree_nt{n_T}", worst, FORMS_TOLERANCE, worst <= FORMS_TOLERANCE))
    for B in (2, 4, 6):
        sin2 = quantization_error_samples(4, B, settings.moment_samples, _rng(settings, 6, B))
        empirical = float(np.mean(np.log2(1.0 - sin2)))
        closed = expected_log2_cos2(4, 2 ** B)
        relative = abs(empirical - closed) / abs(closed)
        results.append(_check(f"angle_mc_nt4_b{B}", relative, 0.02, relative < 0.02,
                              f"empirical {empirical:.5f} closed {closed:.5f}"))
        mean = float(np.mean(sin2))
        exact = expected_sin2_rvq(4, 2 ** B)
        relative = abs(mean - exact) / exact
        results.append(_check(f"rvq_mean_error_nt4_b{B}", relative, 0.02, relative < 0.02,
                              f"empirical {mean:.5f} exact {exact:.5f}"))
    for B in CELL_BOUND_BITS:
        exact = expected_sin2_rvq(4, 2 ** B)
        delta = sin2_upper_bound(4, B)
        results.append(_check(f"rvq_mean_below_cell_bound_b{B}", exact, delta, exact <= delta))

    # sampled outcomes against genuine codebook search
    n = min(settings.ks_samples, settings.moment_samples)
    rng = _rng(settings, 7)
    genuine = quantization_error_samples(4, EPS_SAMPLING_BITS, n, rng)
    hbar = np.zeros(4, dtype=complex)
    hbar[0] = 1.0
    sampled = np.array([1.0 - abs(sample_rvq_outcome(rng, hbar, EPS_SAMPLING_BITS)[0]) ** 2 for _ in range(n)])
    statistic = ks_two_sample(genuine, sampled)
    critical = ks_critical_value(n, KS_ALPHA, m=n)
    results.append(_check("sampled_quantizer_matches_codebook", statistic, critical, statistic < critical))
    return results


def check_channel_law(settings: ValidationSettings) -> List[CheckResult]:
    """2 rho^2 is chi-square with 2 n_T degrees of freedom"""
    rng = _rng(settings, 8)
    n_T = 4
    rho2 = np.concatenate([draw_channels(rng, n_T, n_T).rho ** 2 for _ in range(settings.ks_samples // n_T)])
    statistic = ks_statistic(2.0 * rho2, scipy_stats.chi2(2 * n_T).cdf)
    critical = ks_critical_value(rho2.size, KS_ALPHA)
    return [_check("channel_norm_chi2", statistic, critical, statistic < critical)]


def power_ratio_deviation(ratios: np.ndarray, expected: float) -> Tuple[float, float]:
    """
    (relative deviation of the mean ratio from expected, allowed deviation)

    the allowance is POWER_TOLERANCE plus three standard errors of the mean
    """
    ratio = float(np.mean(ratios))
    allowed = POWER_TOLERANCE + 3.0 * standard_error(ratios) / expected
    return abs(ratio / expected - 1.0), allowed


def check_signal_model(settings: ValidationSettings) -> List[CheckResult]:
    """
    mean transmit power matches its expectation under perfect and quantized
    CSI, and under quantized CSI the noise-free receiver sees v_k plus the
    leakage term
    """
    constellation = Constellation.from_order(settings.M)
    rng = _rng(settings, 9)
    n_T = K = 4
    P = 10.0
    expected = expected_power_ratio(constellation, K)
    perfect, quantized = [], []
    worst = 0.0
    for _ in range(settings.loopback_trials):
        channels = draw_channels(rng, n_T, K)
        s = constellation.draw(rng, K)
        precoder = build_perfect(channels, constellation, P)
        frame = transmit_frame(channels, precoder, constellation, s, P)
        perfect.append(np.sum(np.abs(np.sqrt(P / precoder.kappa) * (precoder.F @ frame.x)) ** 2) / P)

        qcsi = sample_quantized_users(rng, channels, 4)
        try:
            precoder = build_quantized(channels, qcsi, constellation, P)
        except DegenerateChannelError:
            continue
        frame = transmit_frame(channels, precoder, constellation, s, P)
        quantized.append(np.sum(np.abs(np.sqrt(P / precoder.kappa) * (precoder.F @ frame.x)) ** 2) / P)
        predicted = frame.v + interference_term(channels, qcsi, precoder, frame.x)
        worst = max(worst, float(np.max(np.abs(frame.y - predicted))))

    results = []
    for name, ratios in (("transmit_power_perfect", perfect), ("transmit_power_quantized", quantized)):
        ratios = np.asarray(ratios)
        deviation, allowed = power_ratio_deviation(ratios, expected)
        results.append(_check(name, deviation, allowed, deviation <= allowed,
                              f"ratio {np.mean(ratios):.4f} expected {expected:.4f}"))
    results.append(_check("quantized_signal_model", worst, SIGNAL_MODEL_TOLERANCE, worst <= SIGNAL_MODEL_TOLERANCE))
    return results


def check_kershaw(settings: ValidationSettings) -> List[CheckResult]:
    ns = range(1, 1025)
    bound = np.array([kershaw_J_bound(4, n) for n in ns])
    exact = np.array([beta_sum(4, n) for n in ns])
    margin = float(np.min(bound - exact))
    rise = float(np.max(np.diff(bound)))
    return [
        _check("kershaw_dominates_beta_sum", margin, 0.0, margin > 0.0),
        _check("kershaw_decreasing", rise, 0.0, rise < 0.0),
    ]


def _rate_config(settings: ValidationSettings, snr_grid, bits_grid, schemes) -> ExperimentConfig:
    return ExperimentConfig(n_T=4, K=4, M=settings.M, trials=settings.rate_trials, seed=settings.seed,
                            snr_grid=tuple(snr_grid), bits_grid=tuple(bits_grid), schemes=tuple(schemes),
                            workers=settings.workers)


def _value(records, scheme: str, P_dB: float, B: int):
    for record in curve(records, scheme, B=B):
        if record.P_dB == P_dB:
            return record
    raise KeyError(f"no {scheme} record at P_dB={P_dB}, B={B}")


def check_rate_loss(settings: ValidationSettings) -> List[CheckResult]:
    config = _rate_config(settings, (15.0, 25.0), range(2, 17), ALL_SCHEMES)
    records = run_rate_loss(config)
    results = []
    for P_dB in (15.0, 25.0):
        for B in (4, 8, 12):
            loss = _value(records, TH_LOSS, P_dB, B)
            bound = rate_loss_upper_bound(config.params(B=B, P_dB=P_dB))
            results.append(_check(f"th_loss_bound_p{P_dB:g}_b{B}", loss.mean_rate, bound + 3 * loss.stderr,
                                  loss.mean_rate <= bound + 3 * loss.stderr))

    gaps = [rate_loss_upper_bound(config.params(B=B, P_dB=25.0)) - _value(records, TH_LOSS, 25.0, B).mean_rate
            for B in (8, 10, 12, 14)]
    rise = float(np.max(np.diff(gaps)))
    results.append(_check("th_loss_bound_gap_shrinks", rise, 0.0, rise < 0.0,
                          f"gaps {np.round(gaps, 4).tolist()}"))

    P = 10.0 ** 2.5
    worst = -math.inf
    for B in range(2, 17):
        loss = _value(records, ZF_LOSS, 25.0, B)
        worst = max(worst, loss.mean_rate - 3 * loss.stderr - zf_rate_loss_upper_bound(4, P, B))
    results.append(_check("zf_loss_bound", worst, 0.0, worst <= 0.0))

    worst = math.inf
    for B in range(2, 13):
        worst = min(worst, _value(records, TH_LOSS, 25.0, B).mean_rate - _value(records, ZF_LOSS, 25.0, B).mean_rate)
    results.append(_check("th_loses_more_than_zf", worst, 0.0, worst > 0.0))
    return results


def check_rate_ceiling(settings: ValidationSettings) -> List[CheckResult]:
    config = _rate_config(settings, (30.0, 40.0), (4,), (TH_QUANTIZED,))
    records = run_sweep(config)
    high = _value(records, TH_QUANTIZED, 40.0, 4)
    low = _value(records, TH_QUANTIZED, 30.0, 4)
    ceiling = sum_rate_upper_bound(4, 4, 4)
    rise = high.mean_rate - low.mean_rate
    return [
        _check("th_rate_ceiling_p40_b4", high.mean_rate, ceiling + 3 * high.stderr,
               high.mean_rate <= ceiling + 3 * high.stderr),
        _check("th_rate_saturates_p30_p40", rise, 0.15, rise < 0.15),
    ]


def check_scaled_feedback(settings: ValidationSettings) -> List[CheckResult]:
    snr_grid = tuple(float(p) for p in range(0, 45, 5))
    results = []
    for b, expected in ((3.0, 4.0), (4.0, 5.5)):
        config = replace(_rate_config(settings, snr_grid, (0,), (TH_PERFECT, TH_QUANTIZED)),
                         trials=settings.scaled_trials, scaling=(b, 0.0))
        records = run_scaled_feedback(config)
        db_gaps, bit_gaps, errors = scaled_feedback_gaps(records, snr_grid)
        high = float(db_gaps[-1])
        results.append(_check(f"scaled_db_gap_b{b:g}", abs(high - expected), 1.5, abs(high - expected) <= 1.5,
                              f"gap {high:.3f} dB"))
        excess = float(np.max(bit_gaps - 3 * errors - math.log2(b)))
        results.append(_check(f"scaled_bit_gap_b{b:g}", excess, 0.0, excess <= 0.0))
    return results


SUITE: Tuple[Callable[[ValidationSettings], List[CheckResult]], ...] = (
    check_loopback,
    check_interference_law,
    check_interference_log_moment,
    check_angle_term,
    check_channel_law,
    check_signal_model,
    check_kershaw,
    check_rate_loss,
    check_rate_ceiling,
)


def run_validation(settings: Optional[ValidationSettings] = None) -> List[CheckResult]:
    """
    run the whole suite

    params:
        settings: sample sizes and seed, full scale by default

    return:
        one CheckResult per check, in suite order
    """
    settings = settings or ValidationSettings()
    suite = SUITE + ((check_scaled_feedback,) if settings.include_scaled else ())
    results = []
    started = time.time()
    for check in suite:
        try:
            results.extend(check(settings))
        except Exception as e:
            logger.error(f"failed to run {check.__name__}: {str(e)}")
            results.append(CheckResult(name=check.__name__, statistic=float('nan'), threshold=float('nan'),
                                       passed=False, detail=str(e)))
    failed = sum(not r.passed for r in results)
    logger.info(f"validation finished in {time.time() - started:.2f} seconds: "
                f"{len(results) - failed} passed, {failed} failed")
    return results
