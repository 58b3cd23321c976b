"""
monte carlo sweeps over SNR and feedback size

every trial draws its own channel and quantizer streams from
SeedSequence([seed, trial, stream, ...]), so results do not depend on how
trials are split across workers; blocks are reduced in trial order
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .analysis import feedback_scaling_th, rate_loss_upper_bound, zf_rate_loss_upper_bound
from .channel import draw_channels
from .errors import ConfigError, DegenerateChannelError
from .factory import SchemeFactory
from .log import sim_logger_handler
from .models import (AGGREGATE_USER_INDEX, NO_FEEDBACK_BITS, TH_PERFECT, TH_QUANTIZED, ZF_PERFECT,
                     ZF_QUANTIZED, ChannelSet, Constellation, ExperimentConfig, QuantizedCSI,
                     RateRecord, SystemParams)
from .quantization import (codebooks_for_users, genie_codebook, quantize_users, sample_quantized_users,
                           uses_shared_codebook)
from .schemes.base import PrecodingScheme, TrialContext
from .stats import standard_error
from .tracker import ResampleTracker

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

CHANNEL_STREAM = 0
QUANTIZER_STREAM = 1
# trials handed to one worker at a time
BLOCK_TRIALS = 250
MAX_RESAMPLES = 16
CHANNEL_KEY = ('channel', NO_FEEDBACK_BITS)

TH_LOSS = 'th_loss'
ZF_LOSS = 'zf_loss'
TH_LOSS_BOUND = 'th_loss_bound'
ZF_LOSS_BOUND = 'zf_loss_bound'
# (perfect scheme, quantized scheme, loss name)
LOSS_PAIRS = ((TH_PERFECT, TH_QUANTIZED, TH_LOSS), (ZF_PERFECT, ZF_QUANTIZED, ZF_LOSS))


def trial_rng(seed: int, trial: int, stream: int, *extra: int) -> np.random.Generator:
    """independent generator for one (trial, stream) pair"""
    return np.random.default_rng(np.random.SeedSequence([seed, trial, stream, *extra]))


def quantizer_key(B: int) -> Tuple[str, int]:
    return 'quantized', B


@dataclass(frozen=True)
class SweepSamples:
    """
    per-trial rates of one sweep

    params:
        snr_grid: P_dB values, the L axis of every array
        rates: (scheme, B) -> (trials, L, K) rates in bits
        tracker: resample events of the sweep
    """
    snr_grid: Tuple[float, ...]
    rates: Dict[Tuple[str, int], np.ndarray]
    tracker: ResampleTracker

    def resampled(self, B: int) -> int:
        """resamples behind a cell: channel redraws plus quantizer redraws for B"""
        count = self.tracker.count(CHANNEL_KEY)
        if B != NO_FEEDBACK_BITS:
            count += self.tracker.count(quantizer_key(B))
        return count


def resolve_quantizer(config: ExperimentConfig, B: int) -> str:
    """'codebook', 'sampled' or 'genie' for one feedback size"""
    if config.quantizer != 'auto':
        return config.quantizer
    return 'sampled' if B > config.exact_rvq_bits else 'codebook'


def quantize_trial(config: ExperimentConfig, rng: np.random.Generator, channels: ChannelSet,
                   B: int) -> QuantizedCSI:
    """quantized CSI of one trial with the configured quantizer"""
    mode = resolve_quantizer(config, B)
    if mode == 'sampled':
        return sample_quantized_users(rng, channels, B)
    if mode == 'genie':
        return quantize_users(channels, [genie_codebook(channels)] * channels.K)
    codebooks = codebooks_for_users(rng, B, channels.n_T, channels.K,
                                    per_user=config.per_user_codebooks,
                                    max_bits=config.max_codebook_bits)
    return quantize_users(channels, codebooks)


def log_quantizer_choice(config: ExperimentConfig) -> None:
    """note the feedback sizes that leave the shared exhaustive codebook"""
    if config.quantizer == 'auto':
        sampled = [B for B in config.bits_grid if resolve_quantizer(config, B) == 'sampled']
        if sampled:
            logger.warning(f"B {sampled} above {config.exact_rvq_bits} bits, using the sampled quantizer")
    if config.per_user_codebooks:
        return
    small = [B for B in config.bits_grid
             if resolve_quantizer(config, B) == 'codebook' and not uses_shared_codebook(B, config.K)]
    if small:
        logger.info(f"B {small} gives fewer than K^2={config.K ** 2} codewords, "
                    f"every user gets its own codebook")


class _TrialRunner:
    """evaluates every configured scheme on a range of trials"""

    def __init__(self, config: ExperimentConfig, tracker: ResampleTracker):
        self.config = config
        self.tracker = tracker
        self.constellation = Constellation.from_order(config.M)
        self.powers = 10.0 ** (np.asarray(config.snr_grid, dtype=float) / 10.0)
        schemes = [SchemeFactory.get_scheme(name) for name in config.schemes]
        self.perfect: List[PrecodingScheme] = [s for s in schemes if not s.uses_feedback]
        self.quantized: List[PrecodingScheme] = [s for s in schemes if s.uses_feedback]

    def keys(self) -> List[Tuple[str, int]]:
        keys = [(s.name, NO_FEEDBACK_BITS) for s in self.perfect]
        keys += [(s.name, B) for B in self.config.bits_grid for s in self.quantized]
        return keys

    def run_block(self, start: int, stop: int) -> Dict[Tuple[str, int], np.ndarray]:
        shape = (stop - start, self.powers.size, self.config.K)
        block = {key: np.empty(shape) for key in self.keys()}
        for offset, trial in enumerate(range(start, stop)):
            for key, rates in self.run_trial(trial).items():
                block[key][offset] = rates
        return block

    def run_trial(self, trial: int) -> Dict[Tuple[str, int], np.ndarray]:
        channels, results = self._perfect_cells(trial)
        for B in self.config.bits_grid:
            results.update(self._quantized_cells(trial, channels, B))
        return results

    def _perfect_cells(self, trial: int):
        config = self.config
        for attempt in range(MAX_RESAMPLES):
            channels = draw_channels(trial_rng(config.seed, trial, CHANNEL_STREAM, attempt), config.n_T, config.K)
            context = TrialContext(channels=channels, constellation=self.constellation)
            try:
                return channels, {(s.name, NO_FEEDBACK_BITS): s.rates(context, self.powers) for s in self.perfect}
            except DegenerateChannelError as e:
                self.tracker.record(CHANNEL_KEY, trial, str(e))
        raise DegenerateChannelError(f"failed to simulate trial {trial}: {MAX_RESAMPLES} degenerate channel draws")

    def _quantized_cells(self, trial: int, channels: ChannelSet, B: int):
        if not self.quantized:
            return {}
        config = self.config
        for attempt in range(MAX_RESAMPLES):
            rng = trial_rng(config.seed, trial, QUANTIZER_STREAM, B, attempt)
            context = TrialContext(channels=channels, constellation=self.constellation,
                                   qcsi=quantize_trial(config, rng, channels, B))
            try:
                return {(s.name, B): s.rates(context, self.powers) for s in self.quantized}
            except DegenerateChannelError as e:
                reason = f"{context.qcsi.collisions} codeword collisions" if context.qcsi.collisions else str(e)
                self.tracker.record(quantizer_key(B), trial, reason)
        raise DegenerateChannelError(f"failed to simulate trial {trial}: {MAX_RESAMPLES} degenerate quantizations at B={B}")


def simulate_trials(config: ExperimentConfig, tracker: Optional[ResampleTracker] = None) -> SweepSamples:
    """
    run every trial of a configuration and keep the per-trial rates

    params:
        config: experiment configuration
        tracker: resample tracker to record into, a fresh one by default

    return:
        SweepSamples
    """
    tracker = tracker or ResampleTracker()
    runner = _TrialRunner(config, tracker)
    starts = list(range(0, config.trials, BLOCK_TRIALS))
    stops = [min(start + BLOCK_TRIALS, config.trials) for start in starts]

    started = time.time()
    logger.info(f"simulating {config.trials} trials, n_T={config.n_T} K={config.K} M={config.M}, "
                f"schemes {list(config.schemes)}, B {list(config.bits_grid)}, {config.workers} workers")
    if runner.quantized:
        log_quantizer_choice(config)
    if config.workers == 1:
        blocks = [runner.run_block(start, stop) for start, stop in zip(starts, stops)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            blocks = list(executor.map(runner.run_block, starts, stops))

    rates = {key: np.concatenate([block[key] for block in blocks]) for key in runner.keys()}
    for B in config.bits_grid:
        count = tracker.count(quantizer_key(B))
        if count:
            logger.warning(f"resampled {count} of {config.trials} trials at B={B} (codeword collisions)")
    logger.info(f"simulated {config.trials} trials in {time.time() - started:.2f} seconds, "
                f"{tracker.total()} resamples")
    return SweepSamples(snr_grid=tuple(config.snr_grid), rates=rates, tracker=tracker)


def aggregate(scheme: str, P_dB: float, B: int, samples: np.ndarray, resampled: int = 0) -> List[RateRecord]:
    """
    per-user rows followed by the across-user row for one cell

    params:
        samples: (trials, K) per-trial values
    """
    trials = samples.shape[0]
    records = [
        RateRecord(scheme=scheme, P_dB=float(P_dB), B=int(B), user_index=k,
                   mean_rate=float(samples[:, k].mean()), stderr=standard_error(samples[:, k]),
                   trials=trials, resampled=resampled)
        for k in range(samples.shape[1])
    ]
    across = samples.mean(axis=1)
    records.append(RateRecord(scheme=scheme, P_dB=float(P_dB), B=int(B), user_index=AGGREGATE_USER_INDEX,
                              mean_rate=float(across.mean()), stderr=standard_error(across),
                              trials=trials, resampled=resampled))
    return records


def run_sweep(config: ExperimentConfig) -> List[RateRecord]:
    """
    mean rates of every (scheme, P_dB, B) cell

    perfect-CSI schemes appear once with B = NO_FEEDBACK_BITS
    """
    sweep = simulate_trials(config)
    records = []
    for (scheme, B), rates in sweep.rates.items():
        for index, P_dB in enumerate(sweep.snr_grid):
            records.extend(aggregate(scheme, P_dB, B, rates[:, index, :], sweep.resampled(B)))
    return records


def run_rate_loss(config: ExperimentConfig) -> List[RateRecord]:
    """
    paired rate loss (perfect minus quantized, same channels) for TH and ZF,
    with the matching analytical bounds as across-user rows

    the configured scheme list is ignored, all four schemes are simulated
    """
    sweep = simulate_trials(replace(config, schemes=(TH_PERFECT, TH_QUANTIZED, ZF_PERFECT, ZF_QUANTIZED)))
    records = []
    for perfect, quantized, loss in LOSS_PAIRS:
        for B in config.bits_grid:
            difference = sweep.rates[(perfect, NO_FEEDBACK_BITS)] - sweep.rates[(quantized, B)]
            for index, P_dB in enumerate(sweep.snr_grid):
                records.extend(aggregate(loss, P_dB, B, difference[:, index, :], sweep.resampled(B)))
    for B in config.bits_grid:
        for P_dB in sweep.snr_grid:
            params = config.params(B=B, P_dB=P_dB)
            records.append(_bound_record(TH_LOSS_BOUND, params, rate_loss_upper_bound(params), config.trials))
            records.append(_bound_record(ZF_LOSS_BOUND, params,
                                         zf_rate_loss_upper_bound(config.n_T, params.P, B), config.trials))
    return records


def _bound_record(scheme: str, params: SystemParams, value: float, trials: int) -> RateRecord:
    return RateRecord(scheme=scheme, P_dB=params.P_dB, B=params.B, user_index=AGGREGATE_USER_INDEX,
                      mean_rate=float(value), stderr=0.0, trials=trials)


def scaled_bits(params: SystemParams, P_dB: float, b: float, eps: float) -> int:
    """feedback size from the TH scaling rule, ceiled and clamped at zero"""
    return max(0, int(math.ceil(feedback_scaling_th(params, P_dB, b, eps))))


def run_scaled_feedback(config: ExperimentConfig) -> List[RateRecord]:
    """
    quantized TH with B grown along the SNR grid so the loss stays near log2 b,
    next to perfect-CSI TH on the same channels

    exception:
        ConfigError: no (b, eps) scaling configured
        DomainError: infeasible (b, eps)
    """
    if config.scaling is None:
        raise ConfigError("failed to run scaled feedback: no (b, eps) scaling configured")
    b, eps = config.scaling
    params = config.params()
    bits = [scaled_bits(params, P_dB, b, eps) for P_dB in config.snr_grid]
    logger.info(f"scaled feedback b={b} eps={eps}: B per SNR point {dict(zip(config.snr_grid, bits))}")

    records = run_sweep(replace(config, schemes=(TH_PERFECT,)))
    for B in sorted(set(bits)):
        grid = tuple(P_dB for P_dB, size in zip(config.snr_grid, bits) if size == B)
        records.extend(run_sweep(replace(config, schemes=(TH_QUANTIZED,), snr_grid=grid, bits_grid=(B,))))
    return records


def curve(records: Sequence[RateRecord], scheme: str, user_index: int = AGGREGATE_USER_INDEX,
          B: Optional[int] = None) -> List[RateRecord]:
    """rows of one scheme (and optionally one B) sorted by P_dB"""
    rows = [r for r in records if r.scheme == scheme and r.user_index == user_index and (B is None or r.B == B)]
    return sorted(rows, key=lambda r: r.P_dB)


def measure_db_gap(snr_grid: Sequence[float], perfect_rates: Sequence[float],
                   quantized_rates: Sequence[float]) -> np.ndarray:
    """
    horizontal distance in dB between two rate curves

    for every quantized point, the SNR at which the perfect-CSI curve reaches
    the same rate is found by linear interpolation; the gap is the difference.
    points below the start of the perfect curve give nan

    params:
        snr_grid: P_dB values shared by both curves
        perfect_rates: increasing perfect-CSI rates
        quantized_rates: quantized-CSI rates at the same points
    """
    snr_grid = np.asarray(snr_grid, dtype=float)
    perfect_rates = np.asarray(perfect_rates, dtype=float)
    quantized_rates = np.asarray(quantized_rates, dtype=float)
    if np.any(np.diff(perfect_rates) <= 0):
        logger.warning("perfect-CSI rate curve is not strictly increasing, dB gap is approximate")
    matched = np.interp(quantized_rates, perfect_rates, snr_grid, left=np.nan, right=np.nan)
    return snr_grid - matched


def scaled_feedback_gaps(records: Sequence[RateRecord], snr_grid: Sequence[float],
                         scheme: str = TH_QUANTIZED) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    (dB gaps, bit gaps, bit-gap standard errors) of a scaled-feedback run,
    aggregate rows only

    params:
        scheme: name the quantized rows were written under
    """
    perfect = curve(records, TH_PERFECT, B=NO_FEEDBACK_BITS)
    quantized = curve(records, scheme)
    perfect_rates = np.array([r.mean_rate for r in perfect])
    quantized_rates = np.array([r.mean_rate for r in quantized])
    errors = np.hypot([r.stderr for r in perfect], [r.stderr for r in quantized])
    return measure_db_gap(snr_grid, perfect_rates, quantized_rates), perfect_rates - quantized_rates, errors
