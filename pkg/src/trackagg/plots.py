"""Deterministic SVG figures from sweep result rows.

Plots are a pure function of the results CSV: regenerating from the same
CSV yields byte-identical SVG (fixed hash salt, no embedded timestamps).
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SAVEFIG = dict(format="svg", metadata={"Date": None})

_METRICS = [
    ("rmse_m", "Position error (RMSE, m)", "rmse_vs_size.svg"),
    ("shape_deviation_m", "Shape deviation (m)", "shape_deviation_vs_size.svg"),
]


def _configure():
    matplotlib.rcParams["svg.hashsalt"] = "trackagg"


def _series(rows: list[dict], metric: str):
    """(match_mode, size) -> median metric over non-failed rows."""
    buckets: dict[tuple[str, int], list[float]] = {}
    for row in rows:
        if row.get("error"):
            continue
        val = row.get(metric, "")
        if val == "" or val is None:
            continue
        key = (row["match_mode"], int(row["size"]))
        buckets.setdefault(key, []).append(float(val))
    modes = sorted({k[0] for k in buckets})
    out = {}
    for mode in modes:
        sizes = sorted(s for m, s in buckets if m == mode)
        out[mode] = (sizes, [float(np.median(buckets[(mode, s)])) for s in sizes])
    return out


def plot_metric(rows: list[dict], metric: str, ylabel: str, outpath) -> None:
    _configure()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for mode, (sizes, medians) in _series(rows, metric).items():
        ax.plot(sizes, medians, marker="o", label=mode)
    ax.set_xlabel("Collection size N'")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(outpath, **_SAVEFIG)
    plt.close(fig)


def plot_results(rows: list[dict], outdir) -> list[Path]:
    """The two sweep figures: RMSE and shape deviation vs collection size,
    one curve per matching mode (medians over replications and shapes)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for metric, ylabel, fname in _METRICS:
        path = outdir / fname
        plot_metric(rows, metric, ylabel, path)
        written.append(path)
    return written


def plot_trajectories(trajs, labels, outpath, truth=None) -> None:
    """Overlay polylines; used by the pipeline's report output."""
    _configure()
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    if truth is not None:
        ax.plot(truth.xy[:, 0], truth.xy[:, 1], "k--", lw=1.5, label="ground truth")
    for traj, label in zip(trajs, labels):
        ax.plot(traj.xy[:, 0], traj.xy[:, 1], lw=1.0, label=label)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.grid(True, alpha=0.3)
    if len(trajs) <= 12:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(outpath, **_SAVEFIG)
    plt.close(fig)
