"""Static figures written next to the CSV outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .sim import SweepResult  # noqa: E402

LABELS = {
    "digital": "Digital",
    "hybrid": "Hybrid, standard",
    "sbs": "Hybrid, SbS",
    "SbS": "Hybrid, SbS",
}


def _label(name: str) -> str:
    if name.startswith("SbS_"):
        return f"Hybrid, SbS, Q={name[4:]}"
    return LABELS.get(name, name)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_beampatterns(tables: dict, user_azimuths_deg, path, symbol: int = 0) -> Path:
    """Overlay ``|z|`` in dB for each scheme, with dashed user directions."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, (az, db) in tables.items():
        ax.plot(az, db[:, symbol], label=_label(name))
    for phi in user_azimuths_deg:
        ax.axvline(phi, color="0.5", linestyle="--", linewidth=0.7)
    top = max(np.max(db[:, symbol]) for _, db in tables.values())
    ax.set_ylim(top - 40, top + 3)
    ax.set_xlim(0, 180)
    ax.set_xlabel("Azimuth [deg]")
    ax.set_ylabel("|z| [dB]")
    ax.legend(loc="lower center", fontsize=8)
    return _save(fig, path)


def plot_sweep(result: SweepResult, path, ylabel: str) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    x = np.asarray(result.axis, dtype=float)
    for name, values in result.series.items():
        values = np.asarray(values, dtype=float)
        err = np.asarray(result.stderr[name], dtype=float)
        if np.all(np.isnan(values)):
            continue
        ax.errorbar(x, values, yerr=err, marker="o", markersize=3, capsize=2, label=_label(name))
    ax.set_xlabel({"RFC": "Number of RFCs (L)", "Nusers": "Number of users (K)"}.get(result.axis_name,
                                                                                       result.axis_name))
    ax.set_ylabel(ylabel)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower right", fontsize=8)
    return _save(fig, path)
