"""
closed-form statistics and bounds for TH precoding with RVQ feedback

interference gain eps_k ~ Beta(K - 1, n_T - K); quantization angle terms
from the beta-function sum; rate-loss and interference-limited rate bounds;
feedback scaling rules; the Kershaw bound on the angle term
"""
import logging
import math
from fractions import Fraction
from typing import Tuple

import numpy as np
from scipy import special

from .errors import DomainError
from .log import sim_logger_handler
from .models import SystemParams
from .numerics import beta_fn, digamma, harmonic, regularized_incomplete_beta

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

LOG2E = math.log2(math.e)
LOG2_10_OVER_10 = math.log2(10.0) / 10.0
# the alternating-sum form of E[log2 cos^2] is evaluated in exact rationals up to this n
ALTERNATING_SUM_LIMIT = 256


def _require_interior(n_T: int, K: int, name: str) -> None:
    if not 1 < K < n_T:
        raise DomainError(
            f"failed to evaluate {name}: needs 1 < K < n_T, got K={K}, n_T={n_T}; "
            f"eps is 0 for K = 1 and 1 for K = n_T"
        )


def interference_pdf(x: float, n_T: int, K: int) -> float:
    """density of eps_k: x^(K-2) (1-x)^(n_T-K-1) / beta(K-1, n_T-K)"""
    _require_interior(n_T, K, 'interference density')
    if not 0.0 < x < 1.0:
        return 0.0
    return x ** (K - 2) * (1.0 - x) ** (n_T - K - 1) / beta_fn(K - 1, n_T - K)


def interference_cdf(x: float, n_T: int, K: int) -> float:
    """P(eps_k <= x), the regularized incomplete beta I_x(K-1, n_T-K)"""
    _require_interior(n_T, K, 'interference cdf')
    return regularized_incomplete_beta(min(1.0, max(0.0, x)), K - 1, n_T - K)


def expected_interference(n_T: int, K: int) -> float:
    """E[eps_k] = (K-1)/(n_T-1), with the constant cases K = 1 and K = n_T"""
    if not 1 <= K <= n_T:
        raise DomainError(f"failed to evaluate interference mean: need 1 <= K <= n_T, got K={K}, n_T={n_T}")
    if K == 1:
        return 0.0
    return (K - 1) / (n_T - 1)


def expected_neg_log2_interference(n_T: int, K: int) -> float:
    """
    E[-log2 eps_k] as the finite double sum

    log2 e sum_{m=K-1}^{n_T-2} sum_{l=0}^{n_T-m-2} (n_T-2)! / (m! l! (n_T-m-2-l)!) (-1)^l / (m+l)

    evaluated in exact rationals, so there is no cancellation at any n_T

    return:
        bits; 0 for K = n_T

    exception:
        DomainError: K = 1 (no interference term) or K outside [1, n_T]
    """
    if K == n_T and n_T >= 1:
        return 0.0
    if K == 1:
        raise DomainError("failed to evaluate interference log-moment: no interference term for K = 1")
    _require_interior(n_T, K, 'interference log-moment')
    top = math.factorial(n_T - 2)
    total = Fraction(0)
    for m in range(K - 1, n_T - 1):
        for l in range(0, n_T - m - 1):
            coefficient = top // (math.factorial(m) * math.factorial(l) * math.factorial(n_T - m - 2 - l))
            total += Fraction((-1) ** l * coefficient, m + l)
    return LOG2E * float(total)


def neg_log_interference_digamma(n_T: int, K: int) -> float:
    """E[-ln eps_k] = psi(n_T - 1) - psi(K - 1) in nats, used to check the double sum"""
    _require_interior(n_T, K, 'digamma identity')
    return digamma(n_T - 1) - digamma(K - 1)


def expected_log2_cos2(n_T: int, n: int) -> float:
    """
    E[log2 cos^2 theta] under n-entry RVQ:
    -(log2 e / (n_T - 1)) sum_{i=1}^{n_T-1} beta(n, i / (n_T - 1))

    beta terms are taken in log-gamma space so large n does not overflow
    """
    if n_T < 2 or n < 1:
        raise DomainError(f"failed to evaluate angle term: need n_T >= 2 and n >= 1, got ({n_T}, {n})")
    d = n_T - 1
    return -LOG2E / d * math.fsum(beta_fn(n, i / d) for i in range(1, n_T))


def expected_log2_cos2_alternating(n_T: int, n: int) -> float:
    """
    the same expectation as the alternating sum
    log2 e sum_{i=1}^{n} C(n, i) (-1)^i H_{i (n_T - 1)},
    in exact rationals; only meant for cross-checking small n
    """
    if n_T < 2 or n < 1:
        raise DomainError(f"failed to evaluate angle term: need n_T >= 2 and n >= 1, got ({n_T}, {n})")
    if n > ALTERNATING_SUM_LIMIT:
        raise DomainError(f"failed to evaluate alternating sum: n={n} above {ALTERNATING_SUM_LIMIT}")
    d = n_T - 1
    partial = [Fraction(0)]
    for l in range(1, n * d + 1):
        partial.append(partial[-1] + Fraction(1, l))
    total = Fraction(0)
    for i in range(1, n + 1):
        total += (-1) ** i * math.comb(n, i) * partial[i * d]
    return LOG2E * float(total)


def expected_neg_log2_sin2(n_T: int, n: int) -> float:
    """E[-log2 sin^2 theta] under n-entry RVQ: log2 e H_n / (n_T - 1)"""
    if n_T < 2 or n < 1:
        raise DomainError(f"failed to evaluate angle term: need n_T >= 2 and n >= 1, got ({n_T}, {n})")
    return LOG2E * harmonic(n) / (n_T - 1)


def sin2_upper_bound(n_T: int, B: float) -> float:
    """delta = 2^(-B / (n_T - 1)), bound on E[sin^2 theta]"""
    if n_T < 2:
        raise DomainError(f"failed to evaluate quantization bound: n_T={n_T} must be >= 2")
    return 2.0 ** (-B / (n_T - 1))


def rate_loss_terms(params: SystemParams) -> Tuple[float, float]:
    """
    the two components of the per-user rate-loss bound

    return:
        (log2(1 + c P 2^(-B/(n_T-1))), (log2 e/(n_T-1)) sum_i beta(n, i/(n_T-1)))
    """
    interference = math.log2(1.0 + params.c * params.P * sin2_upper_bound(params.n_T, params.B))
    angle = -expected_log2_cos2(params.n_T, params.n)
    return interference, angle


def rate_loss_upper_bound(params: SystemParams) -> float:
    """upper bound on the mean per-user rate loss of quantized-CSI TH precoding (bits)"""
    interference, angle = rate_loss_terms(params)
    return interference + angle


def zf_rate_loss_upper_bound(n_T: int, P: float, B: float) -> float:
    """zero-forcing counterpart: log2(1 + P 2^(-B / (n_T - 1)))"""
    return math.log2(1.0 + P * sin2_upper_bound(n_T, B))


def sum_rate_upper_bound(n_T: int, K: int, B: int) -> float:
    """
    interference-limited ceiling on the per-user rate with fixed B bits:
    E[-log2 eps] + log2 e H_n / (n_T - 1), the first term 0 when K = n_T

    a single user sees no leakage, its rate grows without limit and the
    ceiling is inf
    """
    if K == 1:
        return math.inf
    return expected_neg_log2_interference(n_T, K) + expected_neg_log2_sin2(n_T, 2 ** B)


def feedback_scaling_zf(n_T: int, P_dB: float, b: float) -> float:
    """
    bits per user keeping the ZF rate loss under log2 b:
    (n_T - 1) (log2 10 / 10) P_dB - (n_T - 1) log2(b - 1)
    """
    if b <= 1:
        raise DomainError(f"failed to scale feedback: b={b} must exceed 1")
    return (n_T - 1) * LOG2_10_OVER_10 * P_dB - (n_T - 1) * math.log2(b - 1.0)


def feedback_scaling_th(params: SystemParams, P_dB: float, b: float, eps: float) -> float:
    """
    bits per user keeping the TH rate-loss bound under log2 b:
    (n_T - 1) (log2 10 / 10) P_dB - log2(b - 2^eps - 1) + log2 c

    exception:
        DomainError: b - 2^eps - 1 <= 0, or c = 0 (single user)
    """
    margin = b - 2.0 ** eps - 1.0
    if margin <= 0:
        raise DomainError(f"failed to scale feedback: b={b}, eps={eps} leave no gap (b - 2^eps - 1 = {margin:.4g})")
    if params.c <= 0:
        raise DomainError("failed to scale feedback: c = 0, a single user has no quantization interference")
    return (params.n_T - 1) * LOG2_10_OVER_10 * P_dB - math.log2(margin) + math.log2(params.c)


def kershaw_J_bound(n_T: int, n: int) -> float:
    """sum_{i=1}^{n_T-1} Gamma(i/(n_T-1)) (n - 1/2)^(-i/(n_T-1)), decreasing in n"""
    if n < 1 or n_T < 2:
        raise DomainError(f"failed to evaluate Kershaw bound: need n >= 1 and n_T >= 2, got ({n_T}, {n})")
    d = n_T - 1
    exponents = np.arange(1, n_T) / d
    return float(np.sum(special.gamma(exponents) * (n - 0.5) ** (-exponents)))


def beta_sum(n_T: int, n: int) -> float:
    """sum_{i=1}^{n_T-1} beta(n, i/(n_T-1)), the quantity the Kershaw bound dominates"""
    d = n_T - 1
    return math.fsum(beta_fn(n, i / d) for i in range(1, n_T))


def instantaneous_rates(values) -> np.ndarray:
    """log2(1 + SNR or SINR), componentwise"""
    return np.log2(1.0 + np.asarray(values, dtype=float))
