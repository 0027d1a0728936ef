"""Wall-clock measurements of the phase search and of Cholesky-OMP iterations."""

from __future__ import annotations

import time

import numpy as np

from .omp import omp_cholesky_steps
from .phase_opt import PhaseSet, phase_search


def _best_time(fn, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def time_phase_search(n: int, q: int, repeats: int = 20, seed: int = 0) -> float:
    """Best-of-``repeats`` seconds for one search on a random length-``n`` vector."""
    rng = np.random.default_rng([seed, n, q])
    r = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    phases = PhaseSet(q)
    return _best_time(lambda: phase_search(r, phases), repeats)


def time_omp_iterations(n: int, q: int, l_max: int, repeats: int = 5, seed: int = 0) -> np.ndarray:
    """Best-of-``repeats`` seconds spent in each of the ``l_max`` OMP iterations."""
    rng = np.random.default_rng([seed, n, q, l_max])
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    phases = PhaseSet(q)
    best = np.full(l_max, np.inf)
    for _ in range(repeats):
        steps = omp_cholesky_steps(y, phases, l_max)
        t0 = time.perf_counter()
        for i, _state in enumerate(steps):
            t1 = time.perf_counter()
            best[i] = min(best[i], t1 - t0)
            t0 = t1
    return best


def run_bench(n_values, q_values, l_max: int, omp_n: int, repeats: int, seed: int = 0) -> list:
    """Rows ``(kind, N, Q, l, seconds)``; ``repeats == 0`` gives an empty report."""
    rows = []
    if repeats <= 0:
        return rows
    for n in n_values:
        for q in q_values:
            rows.append(("phase_search", n, q, 0, time_phase_search(n, q, repeats, seed)))
    if l_max > 0:
        per_iter = time_omp_iterations(omp_n, max(q_values), l_max, repeats, seed)
        for l, sec in enumerate(per_iter, start=1):
            rows.append(("omp_iteration", omp_n, max(q_values), l, float(sec)))
    return rows
