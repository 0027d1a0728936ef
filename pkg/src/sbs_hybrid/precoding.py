"""Digital, standard hybrid and symbol-by-symbol (SbS) hybrid transmitters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_model import UlaConfig, element_gain, radiated_power, steering_matrix
from .errors import DomainError, InvalidArgumentError
from .omp import BatchSolution, omp_cholesky_batch, sbs_precode_block
from .phase_opt import PhaseSet

SERVING_RANGE_DEG = (30.0, 150.0)


@dataclass
class DigitalPrecoder:
    """Per-user beams ``c / g(phi_k, 0) * ramp(phi_k)`` stored as columns."""

    beams: np.ndarray
    norm_constant: float
    azimuths: np.ndarray


@dataclass
class StandardHybridPrecoder:
    analog: np.ndarray
    served_users: int
    norm_constant: float = 1.0

    def transmit(self, symbols) -> np.ndarray:
        """N x T signal for the served users' rows of the K x T symbol block."""
        s = np.asarray(symbols, dtype=complex)[: self.served_users]
        return self.norm_constant * (self.analog @ s)


def check_serving_range(azimuths) -> np.ndarray:
    az = np.atleast_1d(np.asarray(azimuths, dtype=float))
    lo, hi = np.radians(SERVING_RANGE_DEG)
    tol = 1e-12
    if np.any(az < lo - tol) or np.any(az > hi + tol):
        raise DomainError(f"azimuths must lie within {SERVING_RANGE_DEG} degrees, "
                          f"got {np.round(np.degrees(az), 3).tolist()}")
    return az


def power_normalization(cfg: UlaConfig, y_block, grid_deg: float = 1.0) -> float:
    """Scale ``c`` that brings the block's radiated power to ``4*pi*T``."""
    y = np.asarray(y_block, dtype=complex)
    total = radiated_power(cfg, y, grid_deg)
    if total <= 0:
        raise InvalidArgumentError("cannot normalize a block that radiates no power")
    return float(np.sqrt(4.0 * np.pi * y.shape[1] / total))


def build_digital(cfg: UlaConfig, azimuths, symbols, grid_deg: float = 1.0):
    """Digital beams towards ``azimuths`` and the transmitted N x T block.

    The normalization constant is evaluated on the actual symbol block, so
    the returned signal radiates ``4*pi*T`` in total.
    """
    az = check_serving_range(azimuths)
    s = np.asarray(symbols, dtype=complex)
    if s.ndim != 2 or s.shape[0] != az.size:
        raise InvalidArgumentError("symbols must be a K x T block with one row per user")
    if not np.all(np.isfinite(s)):
        raise InvalidArgumentError("symbols must be finite")
    a = steering_matrix(cfg, az, 0.0)
    unit = a / element_gain(cfg.pattern, az, 0.0)[None, :] ** 2
    c = power_normalization(cfg, unit @ s, grid_deg)
    beams = c * unit
    return DigitalPrecoder(beams=beams, norm_constant=c, azimuths=az), beams @ s


def build_standard_hybrid(digital: DigitalPrecoder, phases: PhaseSet, l_chains: int,
                          cfg: UlaConfig | None = None, symbols=None,
                          grid_deg: float = 1.0) -> StandardHybridPrecoder:
    """Quantize the first ``min(L, K)`` digital beams to the phase alphabet.

    With ``cfg`` and ``symbols`` given, the precoder is rescaled so the
    transmitted block radiates ``4*pi*T``, like the digital one.
    """
    if l_chains < 1:
        raise InvalidArgumentError("l_chains must be at least 1")
    served = min(int(l_chains), digital.beams.shape[1])
    analog = phases.quantize(digital.beams[:, :served])
    pre = StandardHybridPrecoder(analog=analog, served_users=served)
    if cfg is not None and symbols is not None:
        pre.norm_constant = power_normalization(cfg, pre.transmit(symbols), grid_deg)
    return pre


def build_sbs(digital_y_block, phases: PhaseSet, l_chains: int):
    """Per-symbol hybrid approximation of a digital N x T block (no renormalization)."""
    y = np.asarray(digital_y_block, dtype=complex)
    if y.ndim != 2:
        raise InvalidArgumentError("digital block must be N x T")
    solutions = sbs_precode_block(y, phases, l_chains)
    hyb = np.zeros_like(y)
    for t, sol in enumerate(solutions):
        hyb[:, t] = sol.approximation
    return solutions, hyb


def build_sbs_path(digital_y_block, phases: PhaseSet, l_max: int):
    """SbS blocks for every ``L = 1..l_max`` from a single OMP run.

    Cholesky OMP with L chains performs the first L iterations of the run with
    ``l_max`` chains, so the intermediate approximations are the L-chain
    solutions. Returns an ``l_max x N x T`` array and the batch result.
    """
    y = np.asarray(digital_y_block, dtype=complex)
    batch: BatchSolution = omp_cholesky_batch(y.T, phases, l_max, keep_path=True)
    return np.transpose(batch.path, (0, 2, 1)), batch
