"""
random vector quantization of channel directions

each receiver picks the codeword with the largest |hbar w^H|^2 and the
transmitter sees only that codeword; the true direction is split into the
quantized component and a unit residual orthogonal to it
"""
import logging
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .log import sim_logger_handler
from .models import ChannelSet, Codebook, QuantizationEntry, QuantizedCSI
from .numerics import beta_fn, sample_complex_gaussian, sample_unit_sphere

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

DEFAULT_MAX_CODEBOOK_BITS = 24
# residual norm below this means the direction sits on a codeword
EXACT_QUANTIZATION_TOLERANCE = 1e-10
# entries of codebook tensors handled per block in quantization_error_samples
BLOCK_ENTRIES = 1 << 22


def generate_rvq(rng: np.random.Generator, B: int, n_T: int,
                 max_bits: int = DEFAULT_MAX_CODEBOOK_BITS) -> Codebook:
    """
    draw a codebook of 2^B isotropic unit vectors

    params:
        rng: random generator
        B: feedback bits, 0 <= B <= max_bits
        n_T: codeword length, >= 2
        max_bits: memory guard

    return:
        Codebook
    """
    if B < 0 or int(B) != B:
        raise DomainError(f"failed to generate codebook: B={B} must be a non-negative integer")
    if n_T < 2:
        raise DomainError(f"failed to generate codebook: n_T={n_T} must be >= 2")
    if B > max_bits:
        raise DomainError(f"failed to generate codebook: B={B} exceeds the {max_bits}-bit memory guard")
    return Codebook(B=int(B), W=sample_unit_sphere(rng, n_T, count=2 ** int(B)))


def quantize(hbar: np.ndarray, codebook: Codebook) -> int:
    """index of the codeword maximizing |hbar w_i^H|^2, lowest index on ties"""
    if codebook.size == 0:
        raise DomainError("failed to quantize: empty codebook")
    gains = np.abs(codebook.W @ np.conj(hbar)) ** 2
    return int(np.argmax(gains))


def decompose(hbar: np.ndarray, hhat: np.ndarray) -> QuantizationEntry:
    """
    split hbar = c hhat + sqrt(sin2) htilde with htilde a unit vector orthogonal to hhat

    params:
        hbar: unit-norm channel direction
        hhat: unit-norm quantized direction

    return:
        QuantizationEntry; exact=True when the residual vanishes, htilde is then
        an arbitrary unit vector orthogonal to hhat
    """
    hbar = np.asarray(hbar, dtype=complex)
    hhat = np.asarray(hhat, dtype=complex)
    c = complex(hbar @ hhat.conj())
    cos2 = min(1.0, abs(c) ** 2)
    sin2 = 1.0 - cos2
    residual = hbar - c * hhat
    norm = np.linalg.norm(residual)
    if norm > EXACT_QUANTIZATION_TOLERANCE:
        return QuantizationEntry(c=c, cos2=cos2, sin2=sin2, htilde=residual / norm, exact=False)
    return QuantizationEntry(c=c, cos2=cos2, sin2=sin2, htilde=_orthogonal_unit(hhat), exact=True)


def _orthogonal_unit(hhat: np.ndarray) -> np.ndarray:
    # project the axis least aligned with hhat onto the complement of hhat
    axis = np.zeros_like(hhat)
    axis[int(np.argmin(np.abs(hhat)))] = 1.0
    vector = axis - (axis @ hhat.conj()) * hhat
    return vector / np.linalg.norm(vector)


def quantize_users(channels: ChannelSet, codebooks: Sequence[Codebook]) -> QuantizedCSI:
    """
    quantize every user's direction

    params:
        channels: channel realization
        codebooks: one codebook per user; pass the same object K times for a shared codebook

    return:
        QuantizedCSI
    """
    if len(codebooks) != channels.K:
        raise DomainError(f"failed to quantize users: {len(codebooks)} codebooks for {channels.K} users")
    indices, hhat, entries = [], [], []
    for k in range(channels.K):
        index = quantize(channels.hbar[k], codebooks[k])
        codeword = codebooks[k].W[index]
        indices.append(index)
        hhat.append(codeword)
        entries.append(decompose(channels.hbar[k], codeword))
    return QuantizedCSI.from_entries(indices, hhat, entries)


def sample_rvq_outcome(rng: np.random.Generator, hbar: np.ndarray, B: int) -> np.ndarray:
    """
    draw the codeword a 2^B-entry RVQ search would return, without the codebook

    sin^2 of the winning codeword is the minimum of 2^B i.i.d. Beta(n_T - 1, 1)
    variables, its residual is isotropic in the complement of hbar and its
    phase is uniform

    params:
        rng: random generator
        hbar: unit-norm channel direction
        B: feedback bits (any size, no codebook is materialized)

    return:
        unit-norm quantized direction
    """
    hbar = np.asarray(hbar, dtype=complex)
    n_T = hbar.size
    if n_T < 2:
        raise DomainError(f"failed to sample quantizer outcome: n_T={n_T} must be >= 2")
    n = 2.0 ** B
    u = rng.random()
    # inverse of P(sin2 <= x) = 1 - (1 - x^(n_T-1))^n
    sin2 = (-np.expm1(np.log1p(-u) / n)) ** (1.0 / (n_T - 1))
    draw = sample_complex_gaussian(rng, 1, n_T)[0]
    perpendicular = draw - (draw @ hbar.conj()) * hbar
    perpendicular /= np.linalg.norm(perpendicular)
    phase = np.exp(2j * np.pi * rng.random())
    return phase * (np.sqrt(1.0 - sin2) * hbar + np.sqrt(sin2) * perpendicular)


def sample_quantized_users(rng: np.random.Generator, channels: ChannelSet, B: int) -> QuantizedCSI:
    """QuantizedCSI from sample_rvq_outcome for every user (indices are -1)"""
    hhat = np.array([sample_rvq_outcome(rng, channels.hbar[k], B) for k in range(channels.K)])
    entries = [decompose(channels.hbar[k], hhat[k]) for k in range(channels.K)]
    return QuantizedCSI.from_entries(-np.ones(channels.K, dtype=int), hhat, entries)


def genie_codebook(channels: ChannelSet) -> Codebook:
    """codebook made of the true directions, quantization without error"""
    return Codebook(B=int(np.ceil(np.log2(max(channels.K, 1)))), W=channels.hbar.copy())


def quantization_error_samples(n_T: int, B: int, trials: int,
                               rng: np.random.Generator) -> np.ndarray:
    """
    sin^2 theta of genuine RVQ, one fresh direction and codebook per trial

    params:
        n_T: vector length
        B: feedback bits
        trials: number of samples
        rng: random generator

    return:
        (trials,) array
    """
    if trials < 1:
        raise DomainError(f"failed to sample quantization error: trials={trials} must be >= 1")
    if B > DEFAULT_MAX_CODEBOOK_BITS:
        raise DomainError(f"failed to sample quantization error: B={B} exceeds the memory guard")
    n = 2 ** B
    block = max(1, BLOCK_ENTRIES // (n * n_T))
    samples = np.empty(trials)
    for start in range(0, trials, block):
        count = min(block, trials - start)
        directions = sample_unit_sphere(rng, n_T, count=count)
        codebooks = sample_unit_sphere(rng, n_T, count=count * n).reshape(count, n, n_T)
        gains = np.abs(np.einsum('tnd,td->tn', codebooks, directions.conj())) ** 2
        samples[start:start + count] = 1.0 - np.minimum(1.0, gains.max(axis=1))
    return samples


def quantization_error_stats(n_T: int, B: int, trials: int, rng: np.random.Generator) -> float:
    """monte carlo mean of sin^2 theta under genuine RVQ"""
    mean = float(quantization_error_samples(n_T, B, trials, rng).mean())
    logger.debug(f"rvq error n_T={n_T} B={B}: mean sin2 {mean:.6f} over {trials} trials")
    return mean


def expected_sin2_rvq(n_T: int, n: int) -> float:
    """exact E[sin^2 theta] for an n-entry RVQ codebook: n * beta(n, n_T / (n_T - 1))"""
    if n_T < 2 or n < 1:
        raise DomainError(f"failed to evaluate rvq error: need n_T >= 2 and n >= 1, got ({n_T}, {n})")
    return n * beta_fn(n, n_T / (n_T - 1.0))


def uses_shared_codebook(B: int, K: int, per_user: bool = False) -> bool:
    """a shared codebook with fewer than K^2 entries collides on most trials, small B gets one per user"""
    return not per_user and 2 ** B >= K * K


def codebooks_for_users(rng: np.random.Generator, B: int, n_T: int, K: int,
                        per_user: bool = False,
                        max_bits: Optional[int] = None) -> Sequence[Codebook]:
    """
    one shared codebook repeated K times, or K independent ones when
    per_user is set or the shared one would be too small
    """
    max_bits = DEFAULT_MAX_CODEBOOK_BITS if max_bits is None else max_bits
    if not uses_shared_codebook(B, K, per_user):
        return [generate_rvq(rng, B, n_T, max_bits) for _ in range(K)]
    shared = generate_rvq(rng, B, n_T, max_bits)
    return [shared] * K
