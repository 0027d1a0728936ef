"""CSV tables and JSON metadata sidecars."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .array_model import beampattern
from .precoding import build_digital, build_sbs, build_standard_hybrid
from .sim import Scenario, SweepResult

BEAMPATTERN_STEP_DEG = 0.25


def _write_rows(path: Path, header, rows) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_sweep(result: SweepResult, path) -> list:
    """Means to ``path`` and standard errors to ``<stem>_stderr.csv`` next to it."""
    path = Path(path)
    err_path = path.with_name(f"{path.stem}_stderr{path.suffix}")
    return [_write_rows(path, result.columns, result.rows()),
            _write_rows(err_path, result.columns, result.rows(errors=True))]


def write_metadata(path, payload: dict) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def beampattern_grid(step_deg: float = BEAMPATTERN_STEP_DEG) -> np.ndarray:
    n = int(round(180.0 / step_deg))
    return np.linspace(0.0, 180.0, n + 1)


def scheme_signals(scn: Scenario, grid_deg: float = 1.0) -> dict:
    """Transmitted N x T blocks of the digital, SbS and standard hybrid schemes."""
    cfg = scn.array()
    phases = scn.phases()
    digital, y = build_digital(cfg, scn.azimuths, scn.symbols, grid_deg)
    _, y_sbs = build_sbs(y, phases, scn.l_chains)
    std = build_standard_hybrid(digital, phases, scn.l_chains, cfg, scn.symbols, grid_deg)
    return {"digital": y, "sbs": y_sbs, "hybrid": std.transmit(scn.symbols)}


def beampattern_tables(scn: Scenario, step_deg: float = BEAMPATTERN_STEP_DEG,
                       grid_deg: float = 1.0) -> dict:
    """Per scheme, ``(azimuth_deg, magnitude_db)`` with one dB column per symbol."""
    cfg = scn.array()
    az = beampattern_grid(step_deg)
    out = {}
    for name, y in scheme_signals(scn, grid_deg).items():
        mag = beampattern(cfg, y, np.radians(az))
        out[name] = (az, 20.0 * np.log10(np.maximum(mag, 1e-300)))
    return out


def write_beampatterns(tables: dict, out_dir) -> list:
    paths = []
    for name, (az, db) in tables.items():
        header = ["azimuth_deg", "magnitude_db"] + [f"magnitude_db_{t}" for t in range(1, db.shape[1])]
        rows = ([float(a), *(float(v) for v in row)] for a, row in zip(az, db))
        paths.append(_write_rows(Path(out_dir) / f"beampattern_{name}.csv", header, rows))
    return paths


def write_bench(rows, path) -> Path:
    return _write_rows(path, ["kind", "N", "Q", "l", "seconds"], rows)
