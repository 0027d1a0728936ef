"""Discrete-phase correlation maximization.

Given a complex vector ``r`` of length N and the alphabet of Q equispaced
unit phases, find the unit-modulus vector ``omega`` with entries in the
alphabet that maximizes ``|omega^H r|``. The fast search enumerates the N
candidate rotations whose phases all fit inside a sector of width 2*pi/Q and
runs in O(N log N) regardless of Q. An exhaustive search over all Q**N
vectors is provided as a reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, SizeLimitError

TWO_PI = 2.0 * np.pi
DEFAULT_BRUTE_FORCE_CAP = 10**7
# candidates within this relative distance of the maximum count as tied
TIE_RTOL = 1e-12
# entries this small relative to the largest one are treated as exact zeros
ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class PhaseSet:
    """Alphabet ``{exp(2j*pi*q/Q) : q = 0..Q-1}`` of the fixed phase shifters."""

    q_count: int

    def __post_init__(self):
        if int(self.q_count) != self.q_count or self.q_count < 1:
            raise InvalidArgumentError(f"q_count must be a positive integer, got {self.q_count!r}")
        object.__setattr__(self, "q_count", int(self.q_count))

    @property
    def delta(self) -> float:
        """Phase resolution in radians."""
        return TWO_PI / self.q_count

    @property
    def alphabet(self) -> np.ndarray:
        return self.from_indices(np.arange(self.q_count))

    def from_indices(self, indices) -> np.ndarray:
        idx = np.mod(np.asarray(indices, dtype=np.int64), self.q_count)
        return np.exp(1j * self.delta * idx)

    def nearest_indices(self, phase) -> np.ndarray:
        """Index of the closest alphabet phase (wrap-around distance).

        Exact half-resolution ties go to the larger index.
        """
        x = np.mod(np.asarray(phase, dtype=float), TWO_PI) / self.delta
        return np.mod(np.floor(x + 0.5).astype(np.int64), self.q_count)

    def quantize(self, values) -> np.ndarray:
        """Replace every entry by the alphabet member nearest to its phase."""
        return self.from_indices(self.nearest_indices(np.angle(values)))

    def contains(self, values, tol: float = 1e-12) -> np.ndarray:
        """Elementwise membership test for unit complex numbers."""
        values = np.asarray(values, dtype=complex)
        x = np.mod(np.angle(values), TWO_PI) / self.delta
        err = np.abs(x - np.round(x)) * self.delta
        return (np.abs(np.abs(values) - 1.0) <= tol) & (err <= tol)


@dataclass
class PhaseSearchState:
    """Working state of the sector search for one input vector.

    ``z`` holds the rotated copies of the input with phases in ``[0, delta)``;
    ``ordering`` sorts those phases; ``sums`` are the N candidate figures of
    merit visited by the recursion; ``base_indices`` are the alphabet
    rotations removed from each entry.
    """

    z: np.ndarray
    ordering: np.ndarray
    sums: np.ndarray
    base_indices: np.ndarray
    best_index: int
    best_magnitude: float
    phases: PhaseSet = field(repr=False)

    @property
    def running_sum(self) -> complex:
        return complex(self.sums[self.best_index])

    def indices(self) -> np.ndarray:
        """Alphabet indices of the optimal phase vector in canonical form."""
        idx = _output_indices(self.base_indices, self.ordering, np.asarray(self.best_index),
                              self.phases.q_count, self.z == 0)
        return _canonical(idx, self.z == 0, self.phases.q_count)

    def omega(self) -> np.ndarray:
        return self.phases.from_indices(self.indices())


def _rotate_into_sector(r: np.ndarray, delta: float, q: int):
    theta = np.mod(np.angle(r), TWO_PI)
    steps = np.floor(theta / delta)
    zphase = np.clip(theta - steps * delta, 0.0, np.nextafter(delta, 0.0))
    base = np.mod(steps.astype(np.int64), q)
    mag = np.abs(r)
    zero = mag <= ZERO_RTOL * mag.max(axis=-1, keepdims=True)
    mag = np.where(zero, 0.0, mag)
    zphase = np.where(zero, 0.0, zphase)
    base = np.where(zero, 0, base)
    return mag * np.exp(1j * zphase), zphase, base


def _canonical(idx, zero_mask, q):
    """Representative of ``idx`` modulo a global phase and free zero entries.

    Zero entries get index 0 and the first nonzero entry is rotated to index
    0, which is the lexicographically smallest equivalent vector.
    """
    first = np.argmax(~zero_mask, axis=-1)[..., None]
    shift = np.take_along_axis(idx, first, axis=-1)
    return np.where(zero_mask, 0, (idx - shift) % q)


def _candidate_sums(z_sorted: np.ndarray, delta: float) -> np.ndarray:
    n = z_sorted.shape[-1]
    start = z_sorted.sum(axis=-1, keepdims=True)
    steps = z_sorted[..., : n - 1] * (np.exp(1j * delta) - 1.0)
    return np.cumsum(np.concatenate([start, steps], axis=-1), axis=-1)


def _output_indices(base, ordering, best, q, zero_mask):
    rank = np.argsort(ordering, axis=-1, kind="stable")
    rotated = rank < np.asarray(best)[..., None]
    idx = np.where(rotated, base - 1, base) % q
    return np.where(zero_mask, 0, idx)


def _break_ties(mags, best, base, ordering, q, zero_mask):
    """Among near-maximal candidates pick the one whose canonical index vector
    is lexicographically smallest, as exhaustive enumeration would."""
    top = np.take_along_axis(mags, best[..., None], axis=-1)
    tied = mags >= top * (1.0 - TIE_RTOL)
    rows = np.argwhere(np.count_nonzero(tied, axis=-1) > 1)
    for row in map(tuple, rows):
        keys = []
        for m in np.flatnonzero(tied[row]):
            idx = _output_indices(base[row], ordering[row], m, q, zero_mask[row])
            keys.append((tuple(_canonical(idx, zero_mask[row], q)), m))
        best[row] = min(keys)[1]
    return best


def _check_input(r) -> np.ndarray:
    r = np.asarray(r, dtype=complex)
    if r.ndim == 0 or r.shape[-1] == 0:
        raise InvalidArgumentError("input vector must be non-empty")
    if not np.all(np.isfinite(r)):
        raise InvalidArgumentError("input vector has non-finite entries")
    return r


def phase_search(r, phases: PhaseSet) -> PhaseSearchState:
    """Run the O(N log N) sector search on a single vector and keep its state."""
    r = _check_input(r)
    if r.ndim != 1:
        raise InvalidArgumentError("phase_search expects a 1-D vector")
    z, zphase, base = _rotate_into_sector(r, phases.delta, phases.q_count)
    ordering = np.argsort(zphase, kind="stable")
    sums = _candidate_sums(z[ordering], phases.delta)
    mags = np.abs(sums)
    best = int(_break_ties(mags[None], np.argmax(mags)[None], base[None], ordering[None],
                           phases.q_count, (z == 0)[None])[0])
    return PhaseSearchState(z=z, ordering=ordering, sums=sums, base_indices=base,
                            best_index=best, best_magnitude=float(np.abs(sums[best])),
                            phases=phases)


def optimal_phase_indices(r, phases: PhaseSet):
    """Batched sector search over the last axis of ``r``.

    Returns ``(indices, objective)`` where ``indices`` has the shape of ``r``
    and ``objective`` is the maximal ``|omega^H r|`` per vector. The indices
    are canonical: entries where ``r`` vanishes get 0 and the first other
    entry is 0, fixing the global phase that does not affect the objective.
    """
    r = _check_input(r)
    z, zphase, base = _rotate_into_sector(r, phases.delta, phases.q_count)
    ordering = np.argsort(zphase, axis=-1, kind="stable")
    sums = _candidate_sums(np.take_along_axis(z, ordering, axis=-1), phases.delta)
    mags = np.abs(sums)
    best = np.argmax(mags, axis=-1)
    if mags.ndim == 1:
        best = _break_ties(mags[None], best[None], base[None], ordering[None],
                           phases.q_count, (z == 0)[None])[0]
    else:
        best = _break_ties(mags, best, base, ordering, phases.q_count, z == 0)
    objective = np.take_along_axis(mags, best[..., None], axis=-1)[..., 0]
    idx = _output_indices(base, ordering, best, phases.q_count, z == 0)
    return _canonical(idx, z == 0, phases.q_count), objective


def optimal_phase_vector(r, phases: PhaseSet):
    """Alphabet vector maximizing ``|omega^H r|`` and the attained maximum.

    Accepts a single vector or a stack of vectors along leading axes.
    """
    idx, objective = optimal_phase_indices(r, phases)
    if np.ndim(objective) == 0:
        objective = float(objective)
    return phases.from_indices(idx), objective


def brute_force_phase_vector(r, phases: PhaseSet, cap: int = DEFAULT_BRUTE_FORCE_CAP,
                             alphabet=None):
    """Exhaustive maximization of ``|omega^H r|`` over all Q**N alphabet vectors.

    Candidates are enumerated lexicographically by phase index (antenna 0
    most significant); among maximizers within 1e-12 relative the
    lexicographically smallest is returned. ``alphabet`` overrides the
    candidate phases, which is only useful for fault injection.
    """
    r = _check_input(r)
    if r.ndim != 1:
        raise InvalidArgumentError("brute_force_phase_vector expects a 1-D vector")
    n, q = r.size, phases.q_count
    if q**n > cap:
        raise SizeLimitError(f"Q**N = {q}**{n} exceeds the enumeration cap {cap}")
    symbols = phases.alphabet if alphabet is None else np.asarray(alphabet, dtype=complex)
    contrib = np.conj(symbols)[None, :] * r[:, None]
    corr = contrib[0]
    for row in contrib[1:]:
        corr = (corr[:, None] + row[None, :]).ravel()
    mags = np.abs(corr)
    top = mags.max()
    best = int(np.flatnonzero(mags >= top * (1.0 - TIE_RTOL))[0])
    idx = np.array(np.unravel_index(best, (q,) * n), dtype=np.int64)
    return symbols[idx], float(mags[best])
