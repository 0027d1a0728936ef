"""Oracle self-checks runnable outside the test suite (``sbs-hybrid --command verify``)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array_model import steering_matrix
from .metrics import decompose
from .omp import complete_dictionary, omp_cholesky, omp_naive
from .phase_opt import PhaseSet, brute_force_phase_vector, optimal_phase_vector
from .precoding import build_digital
from .sim import reference_scenario

SUITES = ("phase-opt", "omp", "digital")


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _perturbed_alphabet(phases: PhaseSet, fault: float):
    alphabet = phases.alphabet.copy()
    if fault:
        alphabet[-1] *= np.exp(1j * fault)
    return alphabet


def check_phase_opt(seeds, fault: float = 0.0) -> SuiteResult:
    res = SuiteResult("phase-opt")
    for seed in seeds:
        rng = np.random.default_rng([seed, 101])
        for n in range(1, 7):
            for q in (2, 3, 4, 8):
                r = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                phases = PhaseSet(q)
                _, fast = optimal_phase_vector(r, phases)
                _, exact = brute_force_phase_vector(r, phases, alphabet=_perturbed_alphabet(phases, fault))
                res.cases += 1
                if abs(fast - exact) > 1e-9 * max(exact, 1e-300):
                    res.failures.append(f"seed={seed} N={n} Q={q}: {fast!r} != {exact!r}")
    return res


def check_omp(seeds) -> SuiteResult:
    res = SuiteResult("omp")
    phases = PhaseSet(4)
    dictionary = complete_dictionary(5, phases)
    for seed in seeds:
        rng = np.random.default_rng([seed, 202])
        y = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        for sparsity in (1, 2, 3):
            fast = omp_cholesky(y, phases, sparsity)
            slow = omp_naive(y, dictionary, sparsity)
            res.cases += 1
            if fast.columns != slow.columns:
                res.failures.append(f"seed={seed} L={sparsity}: columns {fast.columns} != {slow.columns}")
            elif np.max(np.abs(fast.baseband - slow.baseband)) > 1e-9:
                res.failures.append(f"seed={seed} L={sparsity}: baseband mismatch")
    return res


def check_digital(seeds) -> SuiteResult:
    res = SuiteResult("digital")
    for seed in seeds:
        scn = reference_scenario(n_symbols=40, seed=seed)
        cfg = scn.array()
        digital, y = build_digital(cfg, scn.azimuths, scn.symbols)
        a = steering_matrix(cfg, scn.azimuths)
        dec = decompose(a.conj().T @ y, scn.symbols)
        res.cases += 1
        dist = np.max(np.linalg.norm(dec.distortion, axis=0))
        gerr = np.max(np.abs(dec.gain_matrix - a.conj().T @ digital.beams))
        if dist > 1e-10 or gerr > 1e-10:
            res.failures.append(f"seed={seed}: distortion {dist:.3g}, gain error {gerr:.3g}")
    return res


def run_suites(names, seeds, fault: float = 0.0) -> list:
    runners = {"phase-opt": lambda: check_phase_opt(seeds, fault),
               "omp": lambda: check_omp(seeds),
               "digital": lambda: check_digital(seeds)}
    return [runners[name]() for name in names]
