"""Orthogonal matching pursuit for symbol-by-symbol hybrid precoding.

Two solvers approximate a target antenna signal ``y`` by ``F_rf @ f_bb`` with
``F_rf`` an N x L matrix of alphabet phases:

* :func:`omp_naive` ranks the columns of an explicit :class:`Dictionary`
  and refits by least squares through the Gram matrix.
* :func:`omp_cholesky` searches the complete dictionary implicitly through
  :func:`~sbs_hybrid.phase_opt.optimal_phase_indices` and grows a Cholesky
  factor of the Gram matrix one row per iteration.

:func:`omp_cholesky_batch` is the vectorized form of :func:`omp_cholesky`
used for whole symbol blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (BlockPrecodingError, DegenerateSelectionError,
                     InvalidArgumentError, SizeLimitError)
from .phase_opt import PhaseSet, optimal_phase_indices

DIAGONAL_FLOOR = 1e-10
COMPLETE_DICTIONARY_CAP = 10**6


@dataclass(frozen=True)
class Dictionary:
    """Explicit N x M dictionary of alphabet phase vectors."""

    columns: np.ndarray
    kind: str
    phases: PhaseSet

    def __post_init__(self):
        if self.kind not in ("steering", "complete-explicit"):
            raise InvalidArgumentError(f"unknown dictionary kind {self.kind!r}")
        cols = np.asarray(self.columns, dtype=complex)
        if cols.ndim != 2:
            raise InvalidArgumentError("dictionary columns must form a 2-D array")
        if not np.all(self.phases.contains(cols)):
            raise InvalidArgumentError("dictionary entries must be alphabet phases")
        object.__setattr__(self, "columns", cols)

    @property
    def size(self) -> int:
        return self.columns.shape[1]


def steering_dictionary(n_antennas: int, phases: PhaseSet) -> Dictionary:
    """Q steering vectors with phase progressions that are multiples of 2*pi/Q."""
    n = np.arange(n_antennas)[:, None]
    q = np.arange(phases.q_count)[None, :]
    return Dictionary(phases.from_indices(n * q), "steering", phases)


def complete_dictionary(n_antennas: int, phases: PhaseSet,
                        cap: int = COMPLETE_DICTIONARY_CAP) -> Dictionary:
    """All Q**N alphabet vectors, in lexicographic order of their phase indices."""
    q = phases.q_count
    if q**n_antennas > cap:
        raise SizeLimitError(f"complete dictionary with {q}**{n_antennas} columns exceeds cap {cap}")
    grid = np.indices((q,) * n_antennas).reshape(n_antennas, -1)
    return Dictionary(phases.from_indices(grid), "complete-explicit", phases)


def complete_dictionary_index(indices, q_count: int) -> np.ndarray:
    """Column position in :func:`complete_dictionary` of each index column."""
    indices = np.asarray(indices)
    return np.ravel_multi_index(tuple(indices), (q_count,) * indices.shape[0])


@dataclass
class SbSSolution:
    """Hybrid approximation ``analog @ baseband`` of one target vector."""

    analog: np.ndarray
    baseband: np.ndarray
    residual_norm: float
    relative_error: float
    residual_norms: tuple = ()
    truncated: bool = False
    phase_indices: Optional[np.ndarray] = None
    columns: Optional[tuple] = None
    chol: Optional[np.ndarray] = None

    @property
    def n_selected(self) -> int:
        return self.analog.shape[1]

    @property
    def approximation(self) -> np.ndarray:
        return self.analog @ self.baseband


@dataclass
class OmpState:
    """Solver state after ``iteration`` Cholesky-OMP steps."""

    selected: np.ndarray
    chol: np.ndarray
    residual: np.ndarray
    baseband: np.ndarray
    iteration: int
    indices: np.ndarray


def _check_target(target, sparsity: int) -> np.ndarray:
    y = np.asarray(target, dtype=complex)
    if y.ndim != 1 or y.size == 0:
        raise InvalidArgumentError("target must be a non-empty 1-D vector")
    if not np.all(np.isfinite(y)):
        raise InvalidArgumentError("target has non-finite entries")
    if not 1 <= sparsity <= y.size:
        raise InvalidArgumentError(f"sparsity must lie in [1, {y.size}], got {sparsity}")
    if not np.any(y):
        raise InvalidArgumentError("target must be nonzero")
    return y


def omp_naive(target, dictionary: Dictionary, sparsity: int) -> SbSSolution:
    """Greedy OMP over an explicit dictionary with Gram-matrix refits.

    Columns are ranked by ``|omega^H r|``; near ties within 1e-12 relative go
    to the smallest column index and columns are never selected twice.
    """
    y = _check_target(target, sparsity)
    omega = dictionary.columns
    if omega.shape[0] != y.size:
        raise InvalidArgumentError("dictionary row count does not match the target length")
    if sparsity > dictionary.size:
        raise InvalidArgumentError(
            f"sparsity {sparsity} exceeds the {dictionary.size} dictionary columns")

    selected: list[int] = []
    norms = []
    r = y
    for it in range(1, sparsity + 1):
        corr = np.abs(omega.conj().T @ r)
        corr[selected] = -np.inf
        top = corr.max()
        selected.append(int(np.flatnonzero(corr >= top * (1.0 - 1e-12))[0]))
        b = omega[:, selected]
        gram = b.conj().T @ b
        if np.linalg.cond(gram) > 1e12:
            raise DegenerateSelectionError(
                f"selected columns are numerically dependent at iteration {it}", it)
        f = np.linalg.solve(gram, b.conj().T @ y)
        r = y - b @ f
        norms.append(float(np.linalg.norm(r)))

    ynorm = float(np.linalg.norm(y))
    return SbSSolution(analog=b, baseband=f, residual_norm=norms[-1],
                       relative_error=norms[-1] / ynorm, residual_norms=tuple(norms),
                       phase_indices=dictionary.phases.nearest_indices(np.angle(b)),
                       columns=tuple(selected))


def omp_cholesky_steps(target, phases: PhaseSet, sparsity: int) -> Iterator[OmpState]:
    """Iterate Cholesky-factored OMP, yielding the state after every step.

    Stops early, without yielding, when the next selected vector is
    numerically dependent on the previous ones.
    """
    y = _check_target(target, sparsity)
    n = y.size
    q = phases.q_count
    b = np.empty((n, 0), dtype=complex)
    idx_cols = np.empty((n, 0), dtype=np.int64)
    chol = np.empty((0, 0), dtype=complex)
    rhs = np.empty(0, dtype=complex)
    r = y
    for it in range(1, sparsity + 1):
        idx, _ = optimal_phase_indices(r, phases)
        w = phases.from_indices(idx)
        if it == 1:
            chol = np.array([[np.sqrt(n)]], dtype=complex)
        else:
            v = solve_triangular(chol, b.conj().T @ w, lower=True)
            d2 = n - float(np.vdot(v, v).real)
            if d2 <= DIAGONAL_FLOOR * n:
                return
            grown = np.zeros((it, it), dtype=complex)
            grown[:-1, :-1] = chol
            grown[-1, :-1] = v.conj()
            grown[-1, -1] = np.sqrt(d2)
            chol = grown
        b = np.column_stack([b, w])
        idx_cols = np.column_stack([idx_cols, idx])
        rhs = np.append(rhs, np.vdot(w, y))
        z = solve_triangular(chol, rhs, lower=True)
        f = solve_triangular(chol.conj().T, z, lower=False)
        r = y - b @ f
        yield OmpState(selected=b, chol=chol, residual=r, baseband=f, iteration=it,
                       indices=idx_cols)


def omp_cholesky(target, phases: PhaseSet, sparsity: int) -> SbSSolution:
    """Cholesky-factored OMP over the complete phase dictionary.

    Runs exactly ``sparsity`` iterations unless a selected vector is
    numerically dependent on the earlier ones, in which case the shorter
    solution is returned with ``truncated=True``.
    """
    y = _check_target(target, sparsity)
    norms = []
    state = None
    for state in omp_cholesky_steps(y, phases, sparsity):
        norms.append(float(np.linalg.norm(state.residual)))
    ynorm = float(np.linalg.norm(y))
    return SbSSolution(analog=state.selected, baseband=state.baseband,
                       residual_norm=norms[-1], relative_error=norms[-1] / ynorm,
                       residual_norms=tuple(norms), truncated=state.iteration < sparsity,
                       phase_indices=state.indices,
                       columns=tuple(int(c) for c in complete_dictionary_index(state.indices, phases.q_count))
                       if phases.q_count ** y.size <= COMPLETE_DICTIONARY_CAP else None,
                       chol=state.chol)


@dataclass
class BatchSolution:
    """Array form of Cholesky-OMP results for a block of T targets.

    ``indices`` is T x N x L and ``baseband`` T x L; entries past
    ``counts[t]`` are zero for truncated columns. ``path``, when requested,
    is L x T x N and holds the approximation after each iteration.
    """

    indices: np.ndarray
    baseband: np.ndarray
    counts: np.ndarray
    residual_norms: np.ndarray
    target_norms: np.ndarray
    phases: PhaseSet
    path: Optional[np.ndarray] = None

    @property
    def truncated(self) -> np.ndarray:
        return self.counts < self.indices.shape[-1]

    def analog(self) -> np.ndarray:
        a = self.phases.from_indices(self.indices)
        mask = np.arange(a.shape[-1])[None, :] < self.counts[:, None]
        return a * mask[:, None, :]

    def approximations(self) -> np.ndarray:
        """T x N hybrid signals after all iterations."""
        return np.einsum("tnl,tl->tn", self.analog(), self.baseband)

    def solution(self, t: int) -> SbSSolution:
        k = int(self.counts[t])
        analog = self.phases.from_indices(self.indices[t, :, :k])
        norms = tuple(float(x) for x in self.residual_norms[t, :k])
        return SbSSolution(analog=analog, baseband=self.baseband[t, :k].copy(),
                           residual_norm=norms[-1],
                           relative_error=norms[-1] / float(self.target_norms[t]),
                           residual_norms=norms, truncated=k < self.indices.shape[-1],
                           phase_indices=self.indices[t, :, :k].copy())


def _forward(lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    x = np.zeros_like(rhs)
    for i in range(rhs.shape[-1]):
        acc = rhs[:, i] - np.einsum("bj,bj->b", lower[:, i, :i], x[:, :i])
        x[:, i] = acc / lower[:, i, i]
    return x


def _backward_conj(lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # solves lower^H x = rhs
    x = np.zeros_like(rhs)
    m = rhs.shape[-1]
    for i in range(m - 1, -1, -1):
        acc = rhs[:, i] - np.einsum("bj,bj->b", lower[:, i + 1:, i].conj(), x[:, i + 1:])
        x[:, i] = acc / lower[:, i, i].conj()
    return x


def omp_cholesky_batch(targets, phases: PhaseSet, sparsity: int,
                       keep_path: bool = False) -> BatchSolution:
    """Vectorized :func:`omp_cholesky` over the rows of a T x N array."""
    y = np.asarray(targets, dtype=complex)
    if y.ndim != 2:
        raise InvalidArgumentError("targets must be a T x N array")
    n_t, n = y.shape
    if not 1 <= sparsity <= n:
        raise InvalidArgumentError(f"sparsity must lie in [1, {n}], got {sparsity}")
    q = phases.q_count
    indices = np.zeros((n_t, n, sparsity), dtype=np.int64)
    chol = np.zeros((n_t, sparsity, sparsity), dtype=complex)
    rhs = np.zeros((n_t, sparsity), dtype=complex)
    baseband = np.zeros((n_t, sparsity), dtype=complex)
    norms = np.full((n_t, sparsity), np.nan)
    counts = np.zeros(n_t, dtype=np.int64)
    path = np.zeros((sparsity, n_t, n), dtype=complex) if keep_path else None
    approx = np.zeros_like(y)
    r = y.copy()
    active = np.arange(n_t)
    b = np.zeros((n_t, n, sparsity), dtype=complex)

    for l in range(sparsity):
        if active.size:
            idx, _ = optimal_phase_indices(r[active], phases)
            w = phases.from_indices(idx)
            if l == 0:
                chol[active, 0, 0] = np.sqrt(n)
            else:
                proj = np.einsum("bnk,bn->bk", b[active, :, :l].conj(), w)
                v = _forward(chol[active, :l, :l], proj)
                d2 = n - np.sum(np.abs(v) ** 2, axis=1)
                ok = d2 > DIAGONAL_FLOOR * n
                active, w, idx, v, d2 = active[ok], w[ok], idx[ok], v[ok], d2[ok]
                chol[active, l, :l] = v.conj()
                chol[active, l, l] = np.sqrt(d2)
            b[active, :, l] = w
            indices[active, :, l] = idx
            rhs[active, l] = np.einsum("bn,bn->b", w.conj(), y[active])
            z = _forward(chol[active, : l + 1, : l + 1], rhs[active, : l + 1])
            f = _backward_conj(chol[active, : l + 1, : l + 1], z)
            baseband[active, : l + 1] = f
            approx[active] = np.einsum("bnk,bk->bn", b[active, :, : l + 1], f)
            r[active] = y[active] - approx[active]
            norms[active, l] = np.linalg.norm(r[active], axis=1)
            counts[active] = l + 1
        if keep_path:
            path[l] = approx
    return BatchSolution(indices=indices, baseband=baseband, counts=counts,
                         residual_norms=norms, target_norms=np.linalg.norm(y, axis=1),
                         phases=phases, path=path)


def sbs_precode_block(targets, phases: PhaseSet, sparsity: int) -> list[SbSSolution]:
    """Precode every column of an N x T block independently.

    Columns that cannot be precoded (zero or non-finite) are reported
    together through :class:`BlockPrecodingError`; the remaining columns are
    still solved and available on the exception.
    """
    y = np.asarray(targets, dtype=complex)
    if y.ndim != 2:
        raise InvalidArgumentError("targets must be an N x T block")
    n, n_t = y.shape
    if n_t == 0:
        return []
    if not 1 <= sparsity <= n:
        raise InvalidArgumentError(f"sparsity must lie in [1, {n}], got {sparsity}")
    finite = np.all(np.isfinite(y), axis=0)
    nonzero = np.any(y != 0, axis=0) & finite
    failures = {int(t): InvalidArgumentError("target must be nonzero" if finite[t]
                                             else "target has non-finite entries")
                for t in np.flatnonzero(~nonzero)}
    good = np.flatnonzero(nonzero)
    solutions: list = [None] * n_t
    if good.size:
        batch = omp_cholesky_batch(y[:, good].T, phases, sparsity)
        for j, t in enumerate(good):
            solutions[t] = batch.solution(j)
    if failures:
        raise BlockPrecodingError(failures, solutions)
    return solutions
