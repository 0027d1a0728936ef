"""Command-line entry point: ``sbs-hybrid --command <name> [options]``.

Values come from the command defaults, then an optional YAML/JSON config
file, then explicit flags. Exit codes: 0 success, 1 verification failure,
2 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import __version__
from .bench import run_bench
from .errors import ConfigurationError, SbsError
from .report import (beampattern_tables, write_beampatterns, write_bench, write_metadata,
                     write_sweep)
from .sim import (REFERENCE_AZIMUTHS_DEG, REFERENCE_SYMBOLS, Scenario, ScenarioParams,
                  reference_scenario, run_sidr_sweep, run_sumrate_sweep)
from .verify import SUITES, run_suites

log = logging.getLogger("sbs_hybrid")

COMMANDS = ("beampattern", "sidr-sweep", "sumrate-sweep", "verify", "bench")
EXIT_OK, EXIT_VERIFY, EXIT_CONFIG = 0, 1, 2

COMMAND_DEFAULTS = {
    "beampattern": {"rf_chains": 3, "q_phases": 8, "grid_deg": 0.25},
    "sidr-sweep": {"rf_chains": 13, "q_values": [2, 4, 8], "users": 10},
    "sumrate-sweep": {"rf_chains": 4, "q_phases": 8, "users": 10},
    "verify": {"seeds": 10},
    "bench": {"n_values": [512, 1024, 2048, 4096], "q_values": [2, 64], "n_antennas": 256,
              "rf_chains": 16, "bench_repeats": 20},
}


@dataclass
class RunConfig:
    command: str = "verify"
    n_antennas: int = 16
    rf_chains: int = 4
    q_phases: int = 8
    users: int = 10
    realizations: int = 100
    seed: int = 0
    min_separation_deg: float = 7.2
    spatial_guard: Optional[float] = None
    noise_variance: float = 1.0
    out_dir: str = "out"
    grid_deg: float = 1.0
    quadrature_deg: float = 1.0
    symbols: Optional[int] = None
    q_values: list = field(default_factory=lambda: [2, 4, 8])
    l_values: Optional[list] = None
    k_values: Optional[list] = None
    n_values: list = field(default_factory=lambda: [512, 1024, 2048, 4096])
    azimuths_deg: Optional[list] = None
    qpsk_symbols: Optional[list] = None
    suites: Optional[list] = None
    seeds: int = 10
    inject_fault: float = 0.0
    bench_repeats: int = 20
    plots: bool = True

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}; choose from {COMMANDS}")
        if not 1 <= self.n_antennas <= 4096:
            raise ConfigurationError("n_antennas must lie in [1, 4096]")
        if not 1 <= self.q_phases <= 2**20 or not all(1 <= q <= 2**20 for q in self.q_values):
            raise ConfigurationError("phase counts must lie in [1, 2**20]")
        if not 1 <= self.realizations <= 10**6:
            raise ConfigurationError("realizations must lie in [1, 10**6]")
        chains = [self.rf_chains]
        if self.command == "sidr-sweep" and self.l_values:
            chains = self.l_values
        if self.command != "bench" and not all(1 <= l <= self.n_antennas for l in chains):
            raise ConfigurationError("RF chain counts must lie in [1, n_antennas]")
        if self.users < 1:
            raise ConfigurationError("users must be at least 1")
        if self.noise_variance <= 0:
            raise ConfigurationError("noise_variance must be positive")
        if self.grid_deg <= 0 or self.quadrature_deg <= 0:
            raise ConfigurationError("grid steps must be positive")
        if self.suites is not None and set(self.suites) - set(SUITES):
            raise ConfigurationError(f"unknown suite(s) {sorted(set(self.suites) - set(SUITES))}")

    def scenario_params(self, **overrides) -> ScenarioParams:
        base = dict(n_antennas=self.n_antennas, l_chains=self.rf_chains, q_phases=self.q_phases,
                    n_users=self.users, n_symbols=self.symbols,
                    min_separation_deg=self.min_separation_deg, spatial_guard=self.spatial_guard,
                    noise_variance=self.noise_variance, grid_deg=self.quadrature_deg)
        base.update(overrides)
        return ScenarioParams(**base)


def _int_list(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _float_list(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


def _complex_list(text: str) -> list:
    return [complex(x.strip().replace("i", "j")) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sbs-hybrid",
        description="Symbol-by-symbol hybrid precoding simulator.")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="YAML or JSON file with option values")
    p.add_argument("--n-antennas", type=int)
    p.add_argument("--rf-chains", type=int,
                   help="RF chains L (largest L for sidr-sweep, OMP depth for bench)")
    p.add_argument("--q-phases", type=int)
    p.add_argument("--users", type=int, help="users K (largest K for sumrate-sweep)")
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--min-separation-deg", type=float)
    p.add_argument("--spatial-guard", type=float,
                   help="minimum user distance in spatial frequency (default 2/N)")
    p.add_argument("--noise-variance", type=float)
    p.add_argument("--out-dir", type=str)
    p.add_argument("--grid-deg", type=float, help="beampattern azimuth step")
    p.add_argument("--quadrature-deg", type=float, help="radiated-power quadrature step")
    p.add_argument("--symbols", type=int, help="block length T (default 64*K)")
    p.add_argument("--q-values", type=_int_list, help="e.g. 2,4,8")
    p.add_argument("--l-values", type=_int_list, help="e.g. 1..13")
    p.add_argument("--k-values", type=_int_list, help="e.g. 1..10")
    p.add_argument("--n-values", type=_int_list)
    p.add_argument("--azimuths-deg", type=_float_list)
    p.add_argument("--qpsk-symbols", type=_complex_list, help="e.g. -1,1j,-1j")
    p.add_argument("--suites", type=lambda s: [x for x in s.split(",") if x])
    p.add_argument("--seeds", type=int, help="verify: number of seeds starting at --seed")
    p.add_argument("--inject-fault", type=float, help="verify: perturb one alphabet phase (rad)")
    p.add_argument("--bench-repeats", type=int)
    p.add_argument("--no-plots", dest="plots", action="store_const", const=False)
    p.add_argument("--log-level", default="WARNING")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    file_values: dict = {}
    if args.config is not None:
        try:
            file_values = yaml.safe_load(args.config.read_text()) or {}
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"malformed config {args.config}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigurationError("config file must hold a key-value mapping")
        file_values = {k.replace("-", "_"): v for k, v in file_values.items()}
    flag_values = {k: v for k, v in vars(args).items()
                   if v is not None and k not in ("config", "log_level")}
    command = flag_values.get("command", file_values.get("command", "verify"))
    values.update(COMMAND_DEFAULTS.get(command, {}))
    values.update(file_values)
    values.update(flag_values)
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"unknown option(s): {sorted(unknown)}")
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc
    cfg.validate()
    return cfg


def _metadata(cfg: RunConfig, outputs) -> dict:
    return {"package": "sbs_hybrid", "version": __version__, "config": asdict(cfg),
            "outputs": sorted(Path(p).name for p in outputs)}


def cmd_beampattern(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    n_sym = cfg.symbols or 1
    if cfg.azimuths_deg is None and cfg.qpsk_symbols is None:
        scn = reference_scenario(n_symbols=n_sym, seed=cfg.seed, n_antennas=cfg.n_antennas,
                            l_chains=cfg.rf_chains, q_phases=cfg.q_phases)
    else:
        az = cfg.azimuths_deg or list(REFERENCE_AZIMUTHS_DEG)
        sym = cfg.qpsk_symbols or list(REFERENCE_SYMBOLS)
        if len(sym) != len(az):
            raise ConfigurationError("need one symbol per azimuth")
        scn = Scenario(n_antennas=cfg.n_antennas, l_chains=cfg.rf_chains, q_phases=cfg.q_phases,
                       azimuths=np.radians(az), channel_gains=np.ones(len(az)),
                       symbols=np.array(sym, dtype=complex)[:, None], constellation="qpsk-unit",
                       seed=cfg.seed)
    tables = beampattern_tables(scn, cfg.grid_deg, cfg.quadrature_deg)
    outputs = write_beampatterns(tables, out)
    if cfg.plots:
        from .plotting import plot_beampatterns
        outputs.append(plot_beampatterns(tables, np.degrees(scn.azimuths), out / "beampattern.png"))
    write_metadata(out / "beampattern.json", _metadata(cfg, outputs))
    print(f"wrote {len(outputs)} files to {out}")
    return EXIT_OK


def cmd_sidr_sweep(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    l_values = cfg.l_values or list(range(1, cfg.rf_chains + 1))
    params = cfg.scenario_params(l_chains=max(l_values), constellation="qpsk-unit")
    result = run_sidr_sweep(params, l_values, cfg.q_values, cfg.realizations, seed=cfg.seed,
                            hybrid_q=cfg.q_phases)
    outputs = write_sweep(result, out / "SIDRvsRFC.csv")
    if cfg.plots:
        from .plotting import plot_sweep
        outputs.append(plot_sweep(result, out / "SIDRvsRFC.png", "SIDR [dB]"))
    write_metadata(out / "SIDRvsRFC.json", {**_metadata(cfg, outputs), "sweep": result.metadata})
    print(f"wrote {len(outputs)} files to {out}")
    return EXIT_OK


def cmd_sumrate_sweep(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    k_values = cfg.k_values or list(range(1, cfg.users + 1))
    params = cfg.scenario_params(n_users=max(k_values), constellation="gaussian-unit")
    result = run_sumrate_sweep(params, k_values, cfg.realizations, seed=cfg.seed)
    outputs = write_sweep(result, out / "SRvsUSERS.csv")
    if cfg.plots:
        from .plotting import plot_sweep
        outputs.append(plot_sweep(result, out / "SRvsUSERS.png",
                                  "Normalized sum-rate [bit/s/Hz]"))
    write_metadata(out / "SRvsUSERS.json", {**_metadata(cfg, outputs), "sweep": result.metadata})
    print(f"wrote {len(outputs)} files to {out}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    names = list(SUITES) if cfg.suites is None else cfg.suites
    if not names:
        log.warning("no verification suites selected")
        print("no suites selected; nothing to verify")
        return EXIT_OK
    seeds = range(cfg.seed, cfg.seed + cfg.seeds)
    results = run_suites(names, seeds, cfg.inject_fault)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.cases - len(res.failures)}/{res.cases} cases")
        for msg in res.failures[:5]:
            print(f"    {msg}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_bench(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    rows = run_bench(cfg.n_values, cfg.q_values, cfg.rf_chains, cfg.n_antennas,
                     cfg.bench_repeats, cfg.seed)
    path = write_bench(rows, out / "bench.csv")
    for kind, n, q, l, sec in rows:
        print(f"{kind:14s} N={n:5d} Q={q:3d} l={l:3d} {sec * 1e6:10.1f} us")
    if not rows:
        print("empty benchmark report")
    write_metadata(out / "bench.json", _metadata(cfg, [path]))
    return EXIT_OK


HANDLERS = {"beampattern": cmd_beampattern, "sidr-sweep": cmd_sidr_sweep,
            "sumrate-sweep": cmd_sumrate_sweep, "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        return HANDLERS[cfg.command](cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SbsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
