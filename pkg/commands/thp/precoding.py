"""
Tomlinson-Harashima precoding chain and the zero-forcing baseline

transmitter: x_k = MOD(s_k - sum_{l<k} B[k, l] x_l), sent as sqrt(P/kappa) F x
receiver k: y_k = g_k (h_k F x sqrt(P/kappa) + n_k), modulo reduction, slicing
"""
import logging
from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateChannelError, DomainError
from .log import sim_logger_handler
from .models import ChannelSet, Constellation, PrecoderSet, QuantizedCSI, TxFrame, ZFPrecoder
from .numerics import lq_decompose

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

PERFECT = 'perfect'
QUANTIZED = 'quantized'
# |c_k| r_kk below this leaves the receiver scaling undefined
MIN_USEFUL_GAIN = 1e-12


def mod_tau(z, tau: float):
    """
    fold real and imaginary parts into [-tau, tau) with period 2 tau

    params:
        z: complex scalar or array
        tau: half-width of the modulo region

    return:
        z - 2 tau floor((z + tau) / (2 tau)), componentwise
    """
    if tau <= 0:
        raise DomainError(f"failed to reduce modulo: tau={tau} must be positive")
    z = np.asarray(z, dtype=complex)
    period = 2.0 * tau
    real = z.real - period * np.floor((z.real + tau) / period)
    imag = z.imag - period * np.floor((z.imag + tau) / period)
    out = real + 1j * imag
    return complex(out) if out.ndim == 0 else out


def _feedback_from(R: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    diagonal = np.real(np.diag(R))
    Bfb = np.tril(R / diagonal[:, np.newaxis], -1)
    return Bfb, Bfb + np.eye(R.shape[0])


def build_perfect(channels: ChannelSet, constellation: Constellation, P: float) -> PrecoderSet:
    """
    precoder from the true channel: H = R Q, F = Q^H, B = diag(R)^-1 R - I,
    g_k = sqrt(kappa / P) / r_kk
    """
    factors = lq_decompose(channels.H)
    kappa = constellation.kappa(channels.K)
    Bfb, C = _feedback_from(factors.R)
    gain = np.sqrt(kappa / P) / factors.diagonal
    return PrecoderSet(F=factors.Q.conj().T, Bfb=Bfb, C=C, gain=gain.astype(complex), kappa=kappa,
                       R=factors.R, power=float(P), mode=PERFECT)


def build_quantized(channels: ChannelSet, qcsi: QuantizedCSI, constellation: Constellation,
                    P: float) -> PrecoderSet:
    """
    precoder from the quantized directions: Hhat = Rhat Qhat, F = Qhat^H,
    B = diag(Rhat)^-1 Rhat - I, g_k = sqrt(kappa / P) / (rho_k c_k rhat_kk)

    the receiver gain uses the complex projection coefficient c_k, so the
    useful-signal coefficient after scaling is exactly one

    exception:
        DegenerateChannelError: Hhat rank deficient (e.g. two users on one codeword)
    """
    factors = lq_decompose(qcsi.hhat)
    kappa = constellation.kappa(channels.K)
    Bfb, C = _feedback_from(factors.R)
    useful = channels.rho * qcsi.c * factors.diagonal
    if np.min(np.abs(useful)) < MIN_USEFUL_GAIN:
        raise DegenerateChannelError("failed to build quantized precoder: vanishing useful-signal gain")
    gain = np.sqrt(kappa / P) / useful
    return PrecoderSet(F=factors.Q.conj().T, Bfb=Bfb, C=C, gain=gain, kappa=kappa,
                       R=factors.R, power=float(P), mode=QUANTIZED)


def th_encode(s: np.ndarray, precoder: PrecoderSet,
              constellation: Constellation) -> Tuple[np.ndarray, np.ndarray]:
    """
    recursive interference pre-subtraction with modulo reduction

    params:
        s: K data symbols
        precoder: PrecoderSet
        constellation: Constellation defining tau

    return:
        (x, v): channel symbols and effective symbols v = C x
    """
    s = np.asarray(s, dtype=complex)
    K = s.size
    x = np.zeros(K, dtype=complex)
    x[0] = s[0]
    for k in range(1, K):
        x[k] = mod_tau(s[k] - precoder.Bfb[k, :k] @ x[:k], constellation.tau)
    return x, precoder.C @ x


def transmit_receive(channels: ChannelSet, precoder: PrecoderSet, x: np.ndarray, P: float,
                     noise: Optional[np.ndarray] = None) -> np.ndarray:
    """y = G (sqrt(P / kappa) H F x + n), one scalar per receiver"""
    noise = np.zeros(channels.K, dtype=complex) if noise is None else np.asarray(noise, dtype=complex)
    received = np.sqrt(P / precoder.kappa) * (channels.H @ (precoder.F @ x)) + noise
    return precoder.gain * received


def detect(y: np.ndarray, constellation: Constellation) -> np.ndarray:
    """modulo reduction followed by the nearest-symbol quantizer"""
    return constellation.slice(mod_tau(y, constellation.tau))


def transmit_frame(channels: ChannelSet, precoder: PrecoderSet, constellation: Constellation, s: np.ndarray,
                   P: float, noise: Optional[np.ndarray] = None) -> TxFrame:
    """encode, transmit and detect one symbol vector"""
    x, v = th_encode(s, precoder, constellation)
    y = transmit_receive(channels, precoder, x, P, noise)
    return TxFrame(s=np.asarray(s, dtype=complex), v=v, x=x, y=y, shat=detect(y, constellation))


def interference_term(channels: ChannelSet, qcsi: QuantizedCSI, precoder: PrecoderSet,
                      x: np.ndarray) -> np.ndarray:
    """leakage seen by each receiver: sin(theta_k) htilde_k Qhat^H x / (c_k rhat_kk)"""
    leakage = np.sqrt(qcsi.sin2) * (qcsi.htilde @ (precoder.F @ x))
    return leakage / (qcsi.c * precoder.r_diag)


def sinr_perfect(channels: ChannelSet, precoder: PrecoderSet, P) -> np.ndarray:
    """
    xi_k = (P / kappa) r_kk^2

    params:
        P: scalar power or array of powers

    return:
        (K,) for scalar P, otherwise P.shape + (K,)
    """
    P = np.asarray(P, dtype=float)[..., np.newaxis]
    return P / precoder.kappa * precoder.r_diag ** 2


def expected_power_ratio(constellation: Constellation, K: int) -> float:
    """
    E||sqrt(P/kappa) F x||^2 / P

    x_1 = s_1 is never reduced and carries unit energy, the later x_k are
    taken as uniform over the modulo square with energy M / (M - 1)
    """
    region = constellation.M / (constellation.M - 1.0)
    return (1.0 + (K - 1) * region) / constellation.kappa(K)


def raw_interference_gain(qcsi: QuantizedCSI, precoder: PrecoderSet) -> np.ndarray:
    """||htilde_k Qhat^H||^2 computed for every K"""
    return np.sum(np.abs(qcsi.htilde @ precoder.F) ** 2, axis=1)


def interference_gains(qcsi: QuantizedCSI, precoder: PrecoderSet) -> np.ndarray:
    """eps_k = ||htilde_k Qhat^H||^2 in [0, 1]"""
    K, n_T = qcsi.hhat.shape
    if K == n_T:
        # Qhat square unitary
        return np.ones(K)
    if K == 1:
        return np.zeros(1)
    return np.clip(raw_interference_gain(qcsi, precoder), 0.0, 1.0)


def sinr_quantized(channels: ChannelSet, qcsi: QuantizedCSI, precoder: PrecoderSet,
                   P) -> Tuple[np.ndarray, np.ndarray]:
    """
    gamma_k = (P/kappa) rho^2 rhat^2 cos2 / ((P/kappa) rho^2 eps sin2 + 1)

    return:
        (gamma, eps); gamma shaped like sinr_perfect
    """
    eps = interference_gains(qcsi, precoder)
    snr = np.asarray(P, dtype=float)[..., np.newaxis] / precoder.kappa * channels.rho ** 2
    signal = snr * precoder.r_diag ** 2 * qcsi.cos2
    leakage = snr * eps * qcsi.sin2
    return signal / (leakage + 1.0), eps


def build_zf(channels: ChannelSet, qcsi: Optional[QuantizedCSI] = None) -> ZFPrecoder:
    """
    zero-forcing beamformers: normalized columns of the pseudo-inverse of H
    (or of Hhat when quantized CSI is given)

    the pseudo-inverse comes from the same LQ factors, pinv = Q^H R^-1
    """
    design = channels.H if qcsi is None else qcsi.hhat
    factors = lq_decompose(design)
    inverse = factors.Q.conj().T @ np.linalg.inv(factors.R)
    W = inverse / np.linalg.norm(inverse, axis=0, keepdims=True)
    return ZFPrecoder(W=W, mode=PERFECT if qcsi is None else QUANTIZED)


def sinr_zf(channels: ChannelSet, zf: ZFPrecoder, P) -> np.ndarray:
    """
    per-user SINR with power P/K each, interference measured on the true channel

    return:
        shaped like sinr_perfect
    """
    K = channels.K
    gains = np.abs(channels.H @ zf.W) ** 2
    useful = np.diag(gains)
    leaked = gains.sum(axis=1) - useful
    per_user = np.asarray(P, dtype=float)[..., np.newaxis] / K
    return per_user * useful / (per_user * leaked + 1.0)
