"""Linear gain / distortion decomposition of emitted signals and rate figures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, RankDeficiencyError

MAX_GRAM_CONDITION = 1e10
# interference plus distortion below this fraction of the signal power counts as zero
ZERO_POWER_RATIO = 1e-24


@dataclass
class GainDecomposition:
    """``z_t = gain_matrix @ s_t + distortion[:, t]`` with a least-squares gain matrix."""

    gain_matrix: np.ndarray
    distortion: np.ndarray
    interference_power: np.ndarray
    distortion_power: np.ndarray

    @property
    def signal_power(self) -> np.ndarray:
        return np.abs(np.diag(self.gain_matrix)) ** 2


@dataclass
class RateReport:
    sidr_db: float
    sindr: np.ndarray
    capacity: np.ndarray
    sum_rate: float
    noise_variance: float
    channel_gains: np.ndarray


def decompose(z_block, symbols) -> GainDecomposition:
    """Fit ``G = (sum z s^H)(sum s s^H)^-1`` and keep the remainder as distortion."""
    z = np.asarray(z_block, dtype=complex)
    s = np.asarray(symbols, dtype=complex)
    if z.ndim != 2 or s.ndim != 2 or z.shape != s.shape:
        raise InvalidArgumentError("z_block and symbols must be K x T blocks of equal shape")
    k, t = s.shape
    if t < k:
        raise RankDeficiencyError(f"need at least as many symbols as streams (T={t} < K={k})")
    gram = s @ s.conj().T
    if np.linalg.cond(gram) >= MAX_GRAM_CONDITION:
        raise RankDeficiencyError("symbol Gram matrix is singular")
    cross = z @ s.conj().T
    g = np.linalg.solve(gram.T, cross.T).T
    d = z - g @ s
    p = np.abs(g) ** 2
    return GainDecomposition(gain_matrix=g, distortion=d,
                             interference_power=p.sum(axis=1) - np.diag(p),
                             distortion_power=np.mean(np.abs(d) ** 2, axis=1))


def _sidr_per_user(dec: GainDecomposition) -> np.ndarray:
    num = dec.signal_power
    den = dec.interference_power + dec.distortion_power
    den = np.where(den <= ZERO_POWER_RATIO * num, 0.0, den)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def sidr(dec: GainDecomposition) -> float:
    """User-averaged signal to interference-plus-distortion ratio in dB.

    The linear per-user ratios are averaged before converting to dB; a user
    with neither interference nor distortion makes the result ``inf``.
    """
    ratios = _sidr_per_user(dec)
    if np.any(np.isinf(ratios)):
        return float("inf")
    return float(10.0 * np.log10(np.mean(ratios)))


def sindr(dec: GainDecomposition, channel_gains, noise_variance: float) -> np.ndarray:
    h = np.asarray(channel_gains, dtype=float)
    return h * dec.signal_power / (noise_variance + h * (dec.interference_power + dec.distortion_power))


def rate_report(dec: GainDecomposition, channel_gains, noise_variance: float = 1.0) -> RateReport:
    """Per-user Shannon rates (unit symbol rate) and their sum."""
    h = np.asarray(channel_gains, dtype=float)
    if noise_variance <= 0:
        raise InvalidArgumentError("noise_variance must be positive")
    if h.shape != dec.signal_power.shape or np.any(h < 0):
        raise InvalidArgumentError("need one nonnegative channel gain per user")
    ratio = sindr(dec, h, noise_variance)
    cap = np.log2(1.0 + ratio)
    return RateReport(sidr_db=sidr(dec), sindr=ratio, capacity=cap, sum_rate=float(cap.sum()),
                      noise_variance=float(noise_variance), channel_gains=h)
