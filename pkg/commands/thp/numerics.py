"""
numerical building blocks: the LQ factorization the precoders are built on,
complex gaussian / unit-sphere sampling and the special functions used by
the rate analysis
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import special

from .errors import DegenerateChannelError, DomainError
from .log import sim_logger_handler
from .models import LQFactors

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

# pivot magnitude below this fraction of ||H||_F means rank deficient
RANK_TOLERANCE = 1e-10
# above this the harmonic number comes from the digamma identity
EXACT_HARMONIC_LIMIT = 1_000_000
LQ_ALGORITHMS = ('householder', 'gram_schmidt')


def lq_decompose(H, algorithm: str = 'householder') -> LQFactors:
    """
    factor H = R Q with R lower triangular (real positive diagonal) and Q Q^H = I

    params:
        H: K x n_T complex matrix with K <= n_T and full row rank
        algorithm: 'householder' (LAPACK QR of H^H) or 'gram_schmidt' (modified Gram-Schmidt on the rows)

    return:
        LQFactors

    exception:
        DegenerateChannelError: a diagonal pivot is below RANK_TOLERANCE * ||H||_F
        DomainError: bad shape, non-finite input or unknown algorithm
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2:
        raise DomainError(f"failed to factor matrix: expected 2-D input, got shape {H.shape}")
    K, n_T = H.shape
    if K > n_T:
        raise DomainError(f"failed to factor matrix: {K} rows exceed {n_T} columns")
    if not np.all(np.isfinite(H)):
        raise DomainError("failed to factor matrix: input contains NaN or Inf")

    tolerance = RANK_TOLERANCE * np.linalg.norm(H)
    if algorithm == 'householder':
        # H^H = Q1 R1  =>  H = R1^H Q1^H
        q1, r1 = np.linalg.qr(H.conj().T, mode='reduced')
        R = r1.conj().T
        Q = q1.conj().T
    elif algorithm == 'gram_schmidt':
        R, Q = _modified_gram_schmidt(H, tolerance)
    else:
        raise DomainError(f"failed to factor matrix: unknown algorithm '{algorithm}'")

    pivots = np.diag(R)
    magnitude = np.abs(pivots)
    if tolerance == 0.0 or np.min(magnitude) < tolerance:
        raise DegenerateChannelError(
            f"failed to factor matrix: smallest pivot {np.min(magnitude):.3e} below tolerance {tolerance:.3e}"
        )

    # unit-modulus rotation per row of Q so the diagonal of R is real positive
    phase = pivots / magnitude
    R = np.tril(R * phase.conj()[np.newaxis, :])
    Q = Q * phase[:, np.newaxis]
    R[np.diag_indices(K)] = magnitude
    return LQFactors(R=R, Q=Q)


def _modified_gram_schmidt(H: np.ndarray, tolerance: float) -> Tuple[np.ndarray, np.ndarray]:
    K, n_T = H.shape
    V = H.copy()
    R = np.zeros((K, K), dtype=complex)
    Q = np.zeros((K, n_T), dtype=complex)
    for i in range(K):
        norm = np.linalg.norm(V[i])
        if norm <= tolerance:
            raise DegenerateChannelError(
                f"failed to factor matrix: row {i} is dependent on earlier rows (pivot {norm:.3e})"
            )
        R[i, i] = norm
        Q[i] = V[i] / norm
        for j in range(i + 1, K):
            R[j, i] = V[j] @ Q[i].conj()
            V[j] = V[j] - R[j, i] * Q[i]
    return R, Q


def sample_complex_gaussian(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """i.i.d. CN(0, 1) entries: real and imaginary parts each N(0, 1/2)"""
    real = rng.standard_normal((rows, cols))
    imag = rng.standard_normal((rows, cols))
    return (real + 1j * imag) / np.sqrt(2.0)


def sample_unit_sphere(rng: np.random.Generator, n_T: int, count: Optional[int] = None) -> np.ndarray:
    """
    isotropic unit vectors on the n_T-dimensional complex sphere

    params:
        rng: random generator
        n_T: vector length
        count: number of vectors; None returns a single 1-D vector

    return:
        (n_T,) or (count, n_T) complex array with unit-norm rows
    """
    if n_T < 1:
        raise DomainError(f"failed to sample unit vector: n_T={n_T} must be >= 1")
    rows = 1 if count is None else count
    draws = sample_complex_gaussian(rng, rows, n_T)
    norms = np.linalg.norm(draws, axis=1)
    # zero-norm draws have probability zero, redraw them anyway
    while np.any(norms == 0.0):
        bad = norms == 0.0
        draws[bad] = sample_complex_gaussian(rng, int(bad.sum()), n_T)
        norms = np.linalg.norm(draws, axis=1)
    vectors = draws / norms[:, np.newaxis]
    return vectors[0] if count is None else vectors


def _require_positive(name: str, value: float) -> None:
    if not np.all(np.asarray(value) > 0):
        raise DomainError(f"failed to evaluate {name}: argument must be positive, got {value}")


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0"""
    _require_positive('log_gamma', x)
    return float(special.gammaln(x))


def digamma(x: float) -> float:
    """psi(x) = d/dx ln Gamma(x) for x > 0"""
    _require_positive('digamma', x)
    return float(special.digamma(x))


def beta_fn(a: float, b: float) -> float:
    """beta function computed in log space, safe for large a"""
    _require_positive('beta_fn', a)
    _require_positive('beta_fn', b)
    return math.exp(special.betaln(a, b))


def regularized_incomplete_beta(x: float, a: int, b: int) -> float:
    """
    I_x(a, b) for integer shapes through the finite binomial sum
    sum_{m=a}^{a+b-1} C(a+b-1, m) x^m (1-x)^(a+b-1-m)

    params:
        x: point in [0, 1]
        a, b: integer shapes >= 1

    return:
        value in [0, 1]
    """
    if int(a) != a or int(b) != b or a < 1 or b < 1:
        raise DomainError(f"failed to evaluate incomplete beta: shapes must be integers >= 1, got ({a}, {b})")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"failed to evaluate incomplete beta: x={x} outside [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    a, b = int(a), int(b)
    total = a + b - 1
    m = np.arange(a, total + 1)
    log_terms = (special.gammaln(total + 1) - special.gammaln(m + 1) - special.gammaln(total - m + 1)
                 + m * math.log(x) + (total - m) * math.log1p(-x))
    return float(min(1.0, np.exp(log_terms).sum()))


def harmonic(n: int) -> float:
    """partial sum 1 + 1/2 + ... + 1/n"""
    if int(n) != n or n < 1:
        raise DomainError(f"failed to evaluate harmonic number: n={n} must be a positive integer")
    n = int(n)
    if n <= EXACT_HARMONIC_LIMIT:
        return math.fsum(1.0 / np.arange(1, n + 1))
    return float(special.digamma(n + 1.0) + np.euler_gamma)
