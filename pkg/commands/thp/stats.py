import logging
import math
from typing import Callable

import numpy as np
from scipy import stats

from .errors import InsufficientSamplesError
from .log import sim_logger_handler

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

MIN_SAMPLES = 50
# asymptotic Kolmogorov critical coefficients c(alpha)
KS_COEFFICIENTS = {0.10: 1.224, 0.05: 1.358, 0.01: 1.628}


def _check_size(samples, name: str) -> np.ndarray:
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < MIN_SAMPLES:
        raise InsufficientSamplesError(
            f"failed to compute {name}: {samples.size} samples, at least {MIN_SAMPLES} required"
        )
    return samples


def ks_statistic(samples, cdf: Callable) -> float:
    """sup distance between the empirical CDF of samples and a reference CDF"""
    samples = _check_size(samples, 'KS statistic')
    return float(stats.kstest(samples, cdf).statistic)


def ks_two_sample(a, b) -> float:
    """sup distance between two empirical CDFs"""
    a = _check_size(a, 'two-sample KS statistic')
    b = _check_size(b, 'two-sample KS statistic')
    return float(stats.ks_2samp(a, b).statistic)


def ks_critical_value(n: int, alpha: float = 0.01, m: int = None) -> float:
    """
    asymptotic critical value c(alpha) / sqrt(n_eff)

    params:
        n: sample size (first sample for the two-sample case)
        alpha: significance level, one of KS_COEFFICIENTS
        m: second sample size, None for the one-sample test
    """
    coefficient = KS_COEFFICIENTS[alpha]
    effective = n if m is None else n * m / (n + m)
    return coefficient / math.sqrt(effective)


def standard_error(samples) -> float:
    """sample standard deviation over sqrt(count)"""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 2:
        return 0.0
    return float(samples.std(ddof=1) / math.sqrt(samples.size))
