from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError, DomainError

# scheme names understood by the engine and the CSV writer
TH_PERFECT = 'th_perfect'
TH_QUANTIZED = 'th_quantized'
ZF_PERFECT = 'zf_perfect'
ZF_QUANTIZED = 'zf_quantized'
ALL_SCHEMES = (TH_PERFECT, TH_QUANTIZED, ZF_PERFECT, ZF_QUANTIZED)

# B column value for schemes that use no feedback
NO_FEEDBACK_BITS = -1
# user_index column value of across-user aggregate rows
AGGREGATE_USER_INDEX = -1


@dataclass(frozen=True)
class LQFactors:
    """
    lower-triangular / semi-unitary factorization H = R Q

    params:
        R: K x K lower-triangular matrix with real positive diagonal
        Q: K x n_T matrix with orthonormal rows
    """
    R: np.ndarray
    Q: np.ndarray

    @property
    def diagonal(self) -> np.ndarray:
        """real diagonal of R"""
        return np.real(np.diag(self.R)).copy()


@dataclass(frozen=True)
class ChannelSet:
    """
    one realization of all users' channels

    params:
        n_T: number of transmit antennas
        K: number of single-antenna users
        H: K x n_T channel matrix, row k is user k's channel
        rho: channel norms, rho[k] = ||h_k||
        hbar: K x n_T unit-norm channel directions
    """
    n_T: int
    K: int
    H: np.ndarray
    rho: np.ndarray
    hbar: np.ndarray

    @classmethod
    def from_matrix(cls, H: np.ndarray) -> 'ChannelSet':
        """split a channel matrix into per-user norms and directions"""
        H = np.asarray(H, dtype=complex)
        K, n_T = H.shape
        rho = np.linalg.norm(H, axis=1)
        hbar = H / rho[:, np.newaxis]
        return cls(n_T=n_T, K=K, H=H, rho=rho, hbar=hbar)

    def reconstruct(self) -> np.ndarray:
        """rebuild H from norms and directions"""
        return self.rho[:, np.newaxis] * self.hbar

    def permuted(self, order) -> 'ChannelSet':
        """same users in another precoding order"""
        order = np.asarray(order, dtype=int)
        return ChannelSet(n_T=self.n_T, K=self.K, H=self.H[order], rho=self.rho[order],
                          hbar=self.hbar[order])


@dataclass(frozen=True)
class Codebook:
    """
    random vector quantization codebook shared by transmitter and receivers

    params:
        B: feedback bits
        W: 2^B x n_T matrix of unit-norm codewords (one per row)
    """
    B: int
    W: np.ndarray

    @property
    def size(self) -> int:
        return self.W.shape[0]

    @property
    def n_T(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True)
class QuantizationEntry:
    """decomposition of one user's direction around its quantized direction"""
    c: complex
    cos2: float
    sin2: float
    htilde: np.ndarray
    exact: bool


@dataclass(frozen=True)
class QuantizedCSI:
    """
    quantized channel directions of all users

    params:
        index: selected codeword index per user (-1 when the outcome was sampled)
        hhat: K x n_T quantized directions
        c: complex projection coefficients hbar_k hhat_k^H
        cos2: |c_k|^2
        sin2: 1 - cos2
        htilde: K x n_T unit residual directions, orthogonal to hhat
        exact: users whose direction was quantized without error
    """
    index: np.ndarray
    hhat: np.ndarray
    c: np.ndarray
    cos2: np.ndarray
    sin2: np.ndarray
    htilde: np.ndarray
    exact: np.ndarray

    @classmethod
    def from_entries(cls, index, hhat, entries) -> 'QuantizedCSI':
        return cls(
            index=np.asarray(index, dtype=int),
            hhat=np.asarray(hhat, dtype=complex),
            c=np.array([e.c for e in entries], dtype=complex),
            cos2=np.array([e.cos2 for e in entries], dtype=float),
            sin2=np.array([e.sin2 for e in entries], dtype=float),
            htilde=np.array([e.htilde for e in entries], dtype=complex),
            exact=np.array([e.exact for e in entries], dtype=bool),
        )

    @property
    def K(self) -> int:
        return self.hhat.shape[0]

    @property
    def collisions(self) -> int:
        """number of users that picked a codeword already picked by an earlier user"""
        picked = self.index[self.index >= 0]
        return int(picked.size - np.unique(picked).size)


@dataclass(frozen=True)
class Constellation:
    """
    M-ary square QAM with unit average energy

    symbols sit on odd multiples of `spacing` in each dimension, the modulo
    boundary tau = sqrt(M) * spacing is one half-spacing past the outer level
    """
    M: int
    tau: float
    spacing: float
    symbols: np.ndarray

    @classmethod
    def from_order(cls, M: int) -> 'Constellation':
        side = int(round(np.sqrt(M)))
        if M < 4 or side * side != M:
            raise DomainError(f"failed to build constellation: M={M} is not a square integer >= 4")
        spacing = float(np.sqrt(3.0 / (2.0 * (M - 1))))
        levels = (2 * np.arange(side) - side + 1) * spacing
        symbols = (levels[:, np.newaxis] + 1j * levels[np.newaxis, :]).ravel()
        return cls(M=M, tau=side * spacing, spacing=spacing, symbols=symbols)

    @property
    def side(self) -> int:
        return int(round(np.sqrt(self.M)))

    def kappa(self, K: int) -> float:
        """transmit power normalization (M / (M - 1)) K"""
        return self.M / (self.M - 1.0) * K

    def draw(self, rng: np.random.Generator, K: int) -> np.ndarray:
        """K independent equiprobable symbols"""
        return self.symbols[rng.integers(0, self.M, size=K)]

    def slice(self, z) -> np.ndarray:
        """nearest symbol per component, boundary ties go to the lower level"""
        z = np.asarray(z, dtype=complex)
        half = self.side // 2
        re = np.clip(np.ceil(z.real / (2 * self.spacing)) - 1, -half, half - 1)
        im = np.clip(np.ceil(z.imag / (2 * self.spacing)) - 1, -half, half - 1)
        return (2 * re + 1) * self.spacing + 1j * (2 * im + 1) * self.spacing


@dataclass(frozen=True)
class PrecoderSet:
    """
    TH precoder for one channel realization

    params:
        F: n_T x K feedforward matrix
        Bfb: K x K strictly lower-triangular feedback matrix
        C: Bfb + I
        gain: per-receiver complex scaling g_k
        kappa: power normalization (M / (M - 1)) K
        R: lower-triangular factor the precoder was built from (R or R-hat)
        power: P the receiver scaling was computed for
        mode: 'perfect' or 'quantized'
    """
    F: np.ndarray
    Bfb: np.ndarray
    C: np.ndarray
    gain: np.ndarray
    kappa: float
    R: np.ndarray
    power: float
    mode: str

    @property
    def r_diag(self) -> np.ndarray:
        return np.real(np.diag(self.R)).copy()


@dataclass(frozen=True)
class ZFPrecoder:
    """
    zero-forcing beamformers with equal power per user

    params:
        W: n_T x K unit-norm beamformers (one per column)
        mode: 'perfect' or 'quantized'
    """
    W: np.ndarray
    mode: str


@dataclass(frozen=True)
class TxFrame:
    """
    one transmitted and detected symbol vector

    params:
        s: data symbols
        v: effective symbols C x, s shifted onto the 2 tau lattice
        x: channel symbols after the modulo recursion
        y: received scalars after the receiver scaling
        shat: detected symbols
    """
    s: np.ndarray
    v: np.ndarray
    x: np.ndarray
    y: np.ndarray
    shat: np.ndarray

    @property
    def symbol_errors(self) -> int:
        return int(np.count_nonzero(~np.isclose(self.shat, self.s)))


@dataclass(frozen=True)
class SystemParams:
    """
    system parameters entering the closed-form rate expressions

    params:
        n_T: transmit antennas
        K: users
        M: constellation size
        B: feedback bits per user
        P_dB: transmit SNR in dB
    """
    n_T: int
    K: int
    M: int = 4
    B: int = 0
    P_dB: float = 0.0

    def __post_init__(self):
        side = int(round(np.sqrt(self.M)))
        if not 1 <= self.K <= self.n_T:
            raise DomainError(f"failed to set system parameters: need 1 <= K <= n_T, got K={self.K}, n_T={self.n_T}")
        if self.M < 4 or side * side != self.M:
            raise DomainError(f"failed to set system parameters: M={self.M} is not a square integer >= 4")
        if self.B < 0:
            raise DomainError(f"failed to set system parameters: B={self.B} is negative")

    @property
    def n(self) -> int:
        return 2 ** self.B

    @property
    def P(self) -> float:
        return 10.0 ** (self.P_dB / 10.0)

    @property
    def kappa(self) -> float:
        return self.M / (self.M - 1.0) * self.K

    @property
    def c(self) -> float:
        if self.n_T == 1:
            return 0.0
        return (self.K - 1) * self.n_T / (self.kappa * (self.n_T - 1))


@dataclass(frozen=True)
class ExperimentConfig:
    """validated experiment configuration, built by ConfigParser"""
    n_T: int = 4
    K: int = 4
    M: int = 4
    trials: int = 10000
    seed: int = 42
    snr_grid: Tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
    bits_grid: Tuple[int, ...] = (4, 8, 15)
    schemes: Tuple[str, ...] = ALL_SCHEMES
    scaling: Optional[Tuple[float, float]] = None
    output: str = 'results'
    workers: int = 1
    max_codebook_bits: int = 24
    exact_rvq_bits: int = 16
    # 'auto' | 'codebook' | 'sampled' | 'genie'
    quantizer: str = 'auto'
    per_user_codebooks: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"failed to validate config: trials must be >= 1, got {self.trials}")
        if not self.snr_grid or not self.bits_grid:
            raise ConfigError("failed to validate config: snr and bits grids must be non-empty")
        if not 1 <= self.K <= self.n_T:
            raise ConfigError(f"failed to validate config: need 1 <= K <= n_T, got K={self.K}, n_T={self.n_T}")
        unknown = [s for s in self.schemes if s not in ALL_SCHEMES]
        if unknown or not self.schemes:
            raise ConfigError(f"failed to validate config: unknown schemes {unknown}")
        if self.workers < 1:
            raise ConfigError(f"failed to validate config: workers must be >= 1, got {self.workers}")
        if self.quantizer not in ('auto', 'codebook', 'sampled', 'genie'):
            raise ConfigError(f"failed to validate config: unknown quantizer '{self.quantizer}'")

    def params(self, B: int = 0, P_dB: float = 0.0) -> SystemParams:
        return SystemParams(n_T=self.n_T, K=self.K, M=self.M, B=B, P_dB=P_dB)


@dataclass(frozen=True)
class RateRecord:
    """
    one aggregated monte carlo cell

    user_index is AGGREGATE_USER_INDEX for the across-user mean, B is
    NO_FEEDBACK_BITS for perfect-CSI schemes
    """
    scheme: str
    P_dB: float
    B: int
    user_index: int
    mean_rate: float
    stderr: float
    trials: int
    resampled: int = 0


@dataclass
class CheckResult:
    """one row of the validation report"""
    name: str
    statistic: float
    threshold: float
    passed: bool
    detail: str = field(default='')

    @property
    def verdict(self) -> str:
        return 'pass' if self.passed else 'fail'
