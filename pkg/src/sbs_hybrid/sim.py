"""Scenario sampling and Monte Carlo sweeps over the three transmit schemes.

Every random draw comes from a generator seeded by ``(seed, realization,
stream, user)``, so user ``k`` of a realization has the same azimuth, gain
and symbols whatever the total number of users. Sweeps over K therefore use
common random numbers, and results are bit-identical for identical seeds.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .array_model import UlaConfig, steering_matrix
from .errors import ConfigurationError, SamplingStuckError
from .metrics import decompose, rate_report, sidr
from .omp import omp_cholesky_batch
from .phase_opt import PhaseSet
from .precoding import (SERVING_RANGE_DEG, build_digital, build_sbs_path,
                        build_standard_hybrid)

log = logging.getLogger(__name__)

REFERENCE_AZIMUTHS_DEG = (34.0, 48.0, 62.0, 77.0, 85.0, 93.0, 102.0, 116.0, 127.0, 142.0)
REFERENCE_SYMBOLS = (-1, 1j, -1j, -1, -1, 1, -1j, -1, -1, 1j)
CONSTELLATIONS = ("qpsk-unit", "gaussian-unit")

_ANGLE_STREAM, _GAIN_STREAM, _SYMBOL_STREAM = 0, 1, 2
_RESTART_AFTER = 1000


@dataclass(frozen=True)
class ScenarioParams:
    """Hardware and sampling parameters shared by every realization.

    ``spatial_guard`` is the minimum distance between users in the array's
    spatial frequency (phase increment / pi); ``None`` means ``2/N``, the
    mainlobe half-width.
    """

    n_antennas: int = 16
    l_chains: int = 4
    q_phases: int = 8
    n_users: int = 10
    n_symbols: Optional[int] = None
    constellation: str = "qpsk-unit"
    min_separation_deg: float = 7.2
    spatial_guard: Optional[float] = None
    noise_variance: float = 1.0
    grid_deg: float = 1.0
    broadside_azimuth_deg: float = 90.0
    max_rejections: int = 10**5

    def __post_init__(self):
        if self.constellation not in CONSTELLATIONS:
            raise ConfigurationError(f"unknown constellation {self.constellation!r}")
        for name in ("n_antennas", "l_chains", "q_phases", "n_users"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1")
        if self.n_symbols is not None and self.n_symbols < 1:
            raise ConfigurationError("n_symbols must be at least 1")
        if self.noise_variance <= 0:
            raise ConfigurationError("noise_variance must be positive")

    @property
    def block_length(self) -> int:
        return self.n_symbols if self.n_symbols is not None else 64 * self.n_users

    @property
    def guard(self) -> float:
        return 2.0 / self.n_antennas if self.spatial_guard is None else self.spatial_guard

    def array(self) -> UlaConfig:
        return UlaConfig(self.n_antennas, broadside_azimuth_deg=self.broadside_azimuth_deg)


@dataclass
class Scenario:
    n_antennas: int
    l_chains: int
    q_phases: int
    azimuths: np.ndarray
    channel_gains: np.ndarray
    symbols: np.ndarray
    constellation: str
    seed: int
    broadside_azimuth_deg: float = 90.0

    @property
    def n_users(self) -> int:
        return self.azimuths.size

    def array(self) -> UlaConfig:
        return UlaConfig(self.n_antennas, broadside_azimuth_deg=self.broadside_azimuth_deg)

    def phases(self) -> PhaseSet:
        return PhaseSet(self.q_phases)


@dataclass
class SweepResult:
    """Monte Carlo means (and standard errors) of several series along one axis."""

    axis_name: str
    axis: np.ndarray
    series: dict
    stderr: dict
    realizations: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, values in [*self.series.items(), *self.stderr.items()]:
            if len(values) != len(self.axis):
                raise ValueError(f"series {name!r} does not match the axis length")

    @property
    def columns(self) -> list:
        return [self.axis_name, *self.series]

    def rows(self, errors: bool = False):
        table = self.stderr if errors else self.series
        for i, x in enumerate(self.axis):
            yield [x.item() if hasattr(x, "item") else x, *(float(v[i]) for v in table.values())]


def _user_rng(seed: int, realization: int, stream: int, user: int) -> np.random.Generator:
    return np.random.default_rng([seed, realization, stream, user])


def _spatial_range(cfg: UlaConfig) -> float:
    az = np.radians(np.linspace(*SERVING_RANGE_DEG, 4001))
    u = cfg.spatial_frequency(az)
    return float(u.max() - u.min())


def check_feasible(params: ScenarioParams) -> None:
    k = params.n_users
    width = SERVING_RANGE_DEG[1] - SERVING_RANGE_DEG[0]
    if (k - 1) * params.min_separation_deg > width:
        raise ConfigurationError(
            f"{k} users cannot be {params.min_separation_deg} deg apart in a {width} deg sector")
    if (k - 1) * params.guard > _spatial_range(params.array()):
        raise ConfigurationError(
            f"{k} users cannot be {params.guard:.4g} apart in spatial frequency")


def sample_azimuths(params: ScenarioParams, seed: int, realization: int = 0) -> np.ndarray:
    """Sequential rejection sampling of user azimuths, uniform on the serving sector.

    Each candidate is accepted when it keeps the minimum azimuth separation
    and the spatial-frequency guard to every user accepted before it. A
    placement that leaves no room for the next user is restarted.
    """
    check_feasible(params)
    cfg = params.array()
    rng = _user_rng(seed, realization, _ANGLE_STREAM, 0)
    lo, hi = np.radians(SERVING_RANGE_DEG)
    min_sep = np.radians(params.min_separation_deg)
    rejections = 0
    while True:
        chosen: list = []
        misses = 0
        while len(chosen) < params.n_users and misses < _RESTART_AFTER:
            cand = rng.uniform(lo, hi)
            prev = np.array(chosen)
            if prev.size and (np.min(np.abs(prev - cand)) < min_sep or
                              np.min(np.abs(cfg.spatial_frequency(prev) - cfg.spatial_frequency(cand)))
                              < params.guard):
                misses += 1
                rejections += 1
                if rejections > params.max_rejections:
                    raise SamplingStuckError(
                        f"no valid placement of {params.n_users} users after {rejections} rejections")
                continue
            chosen.append(cand)
            misses = 0
        if len(chosen) == params.n_users:
            return np.array(chosen)
        log.debug("restarting user placement after a dead end at %d users", len(chosen))


def draw_symbols(constellation: str, n_users: int, n_symbols: int, seed: int,
                 realization: int = 0) -> np.ndarray:
    rows = []
    for k in range(n_users):
        rng = _user_rng(seed, realization, _SYMBOL_STREAM, k)
        if constellation == "qpsk-unit":
            rows.append(np.exp(1j * (np.pi / 4 + np.pi / 2 * rng.integers(0, 4, n_symbols))))
        else:
            rows.append((rng.standard_normal(n_symbols) + 1j * rng.standard_normal(n_symbols))
                        / np.sqrt(2.0))
    return np.array(rows)


def sample_scenario(params: ScenarioParams, rng_seed: int, realization: int = 0) -> Scenario:
    """One realization: azimuths, Exp(1) channel gains and a K x T symbol block."""
    az = sample_azimuths(params, rng_seed, realization)
    gains = np.array([_user_rng(rng_seed, realization, _GAIN_STREAM, k).exponential()
                      for k in range(params.n_users)])
    symbols = draw_symbols(params.constellation, params.n_users, params.block_length,
                           rng_seed, realization)
    return Scenario(n_antennas=params.n_antennas, l_chains=params.l_chains,
                    q_phases=params.q_phases, azimuths=az, channel_gains=gains,
                    symbols=symbols, constellation=params.constellation, seed=rng_seed,
                    broadside_azimuth_deg=params.broadside_azimuth_deg)


def reference_scenario(n_symbols: int = 1, seed: int = 0, n_antennas: int = 16,
                  l_chains: int = 3, q_phases: int = 8) -> Scenario:
    """Ten users at fixed azimuths; the first symbol vector is the fixed QPSK one.

    Columns after the first are uniform QPSK drawn from ``seed``, which gives
    blocks long enough for the gain decomposition.
    """
    first = np.array(REFERENCE_SYMBOLS, dtype=complex)[:, None]
    extra = np.exp(1j * np.pi / 2 * np.random.default_rng(seed).integers(0, 4, (first.size, n_symbols - 1)))
    return Scenario(n_antennas=n_antennas, l_chains=l_chains, q_phases=q_phases,
                    azimuths=np.radians(REFERENCE_AZIMUTHS_DEG), channel_gains=np.ones(first.size),
                    symbols=np.hstack([first, extra]), constellation="qpsk-unit", seed=seed)


def _mean_and_se(samples: np.ndarray):
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    se = samples.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
    return mean, se


def _db_mean(ratios: np.ndarray):
    """Mean of linear ratios over realizations, in dB, with a delta-method error."""
    mean, se = _mean_and_se(ratios)
    with np.errstate(divide="ignore", invalid="ignore"):
        return 10 * np.log10(mean), 10 / np.log(10) * se / mean


def _sidr_linear(z, symbols) -> float:
    return 10 ** (sidr(decompose(z, symbols)) / 10)


def run_sidr_sweep(base_params: ScenarioParams, l_values, q_values, realizations: int,
                   seed: int = 0, hybrid_q: int = 8) -> SweepResult:
    """Mean SIDR versus the number of RF chains for SbS, digital and standard hybrid.

    The SIDR is averaged over users and realizations in the linear domain.
    The standard hybrid serves every user only when ``L >= K``; other
    entries are NaN.
    """
    if realizations < 1:
        raise ConfigurationError("realizations must be at least 1")
    l_values = [int(x) for x in l_values]
    q_values = [int(x) for x in q_values]
    l_max = max(l_values)
    if l_max > base_params.n_antennas:
        raise ConfigurationError("number of RF chains cannot exceed the number of antennas")
    k = base_params.n_users
    dig = np.zeros(realizations)
    hyb = np.zeros(realizations)
    sbs = {q: np.zeros((realizations, len(l_values))) for q in q_values}
    for rz in range(realizations):
        scn = sample_scenario(base_params, seed, rz)
        cfg = scn.array()
        a = steering_matrix(cfg, scn.azimuths)
        digital, y = build_digital(cfg, scn.azimuths, scn.symbols, base_params.grid_deg)
        dig[rz] = _sidr_linear(a.conj().T @ y, scn.symbols)
        std = build_standard_hybrid(digital, PhaseSet(hybrid_q), k, cfg, scn.symbols,
                                    base_params.grid_deg)
        hyb[rz] = _sidr_linear(a.conj().T @ std.transmit(scn.symbols), scn.symbols)
        for q in q_values:
            path, _ = build_sbs_path(y, PhaseSet(q), l_max)
            for j, l in enumerate(l_values):
                sbs[q][rz, j] = _sidr_linear(a.conj().T @ path[l - 1], scn.symbols)

    n_l = len(l_values)
    dig_db, dig_se = _db_mean(dig)
    hyb_db, hyb_se = _db_mean(hyb)
    served = np.array(l_values) >= k
    series = {"digital": np.full(n_l, dig_db),
              "hybrid": np.where(served, hyb_db, np.nan)}
    errors = {"digital": np.full(n_l, dig_se),
              "hybrid": np.where(served, hyb_se, np.nan)}
    for q in q_values:
        series[f"SbS_{q}"], errors[f"SbS_{q}"] = _db_mean(sbs[q])
    meta = {"sweep": "sidr", "params": asdict(base_params), "l_values": l_values,
            "q_values": q_values, "hybrid_q": hybrid_q, "seed": seed,
            "realizations": realizations}
    return SweepResult("RFC", np.array(l_values), series, errors, realizations, meta)


def run_sumrate_sweep(base_params: ScenarioParams, k_values, realizations: int,
                      seed: int = 0) -> SweepResult:
    """Mean normalized sum-rate versus the number of users.

    The standard hybrid serves the first ``min(L, K)`` users; the others
    receive nothing from it and contribute zero rate.
    """
    if realizations < 1:
        raise ConfigurationError("realizations must be at least 1")
    k_values = [int(x) for x in k_values]
    phases = PhaseSet(base_params.q_phases)
    out = {name: np.zeros((realizations, len(k_values))) for name in ("digital", "hybrid", "SbS")}
    for j, k in enumerate(k_values):
        params = replace(base_params, n_users=k)
        for rz in range(realizations):
            scn = sample_scenario(params, seed, rz)
            cfg = scn.array()
            a = steering_matrix(cfg, scn.azimuths)
            digital, y = build_digital(cfg, scn.azimuths, scn.symbols, params.grid_deg)
            std = build_standard_hybrid(digital, phases, params.l_chains, cfg, scn.symbols,
                                        params.grid_deg)
            batch = omp_cholesky_batch(y.T, phases, params.l_chains)
            signals = {"digital": y, "hybrid": std.transmit(scn.symbols),
                       "SbS": batch.approximations().T}
            for name, sig in signals.items():
                dec = decompose(a.conj().T @ sig, scn.symbols)
                out[name][rz, j] = rate_report(dec, scn.channel_gains,
                                               params.noise_variance).sum_rate
    series, errors = {}, {}
    for name, samples in out.items():
        series[name], errors[name] = _mean_and_se(samples)
    meta = {"sweep": "sumrate", "params": asdict(base_params), "k_values": k_values,
            "seed": seed, "realizations": realizations}
    return SweepResult("Nusers", np.array(k_values), series, errors, realizations, meta)
