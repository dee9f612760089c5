"""Figure rendering: fraction time series and infectious-density panels.

Inputs are never modified; each renderer is a pure function of the run
outputs plus styling and writes one PNG with a deterministic name derived
from the manifest label.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .readers import Manifest, SchemaError, read_series, read_snapshot

DPI = 150


@dataclass
class FigureSpec:
    """What to render from one manifest."""

    kind: str                       # "timeseries" | "snapshot_grid"
    manifest_path: Path
    times: tuple[float, ...] = ()   # snapshot_grid panel times ((): all listed)
    title: str = ""


def render_timeseries(manifest: Manifest, out_dir: Path, title: str = "") -> Path:
    """Infected and noncompliant fraction curves over the full horizon."""
    series = read_series(manifest.series_path)
    t = series["t"]
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.plot(t, series["infected_fraction"], label="infected fraction")
    ax.plot(t, series["noncompliant_fraction"], label="noncompliant fraction")
    ax.set_xlim(t[0], t[-1])
    ax.set_xlabel("time")
    ax.set_ylabel("fraction of total population")
    ax.set_title(title or manifest.label)
    ax.legend()
    ax.grid(alpha=0.3)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{manifest.label}_timeseries.png"
    fig.savefig(out_path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)
    return out_path


def render_snapshot_grid(
    manifest: Manifest,
    out_dir: Path,
    times: tuple[float, ...] = (),
    field_name: str = "I_plus_Istar",
    title: str = "",
) -> Path:
    """One panel per requested time, all sharing a single color scale."""
    requested = tuple(times) if times else tuple(sorted(manifest.snapshot_times))
    missing = [t for t in requested
               if not any(np.isclose(t, s) for s in manifest.snapshot_times)]
    if missing:
        raise SchemaError(
            f"snapshot times {missing} not present in the manifest for "
            f"{manifest.label!r}; available: {sorted(manifest.snapshot_times)}"
        )
    snaps = [read_snapshot(manifest.snapshot_path(t, field_name)) for t in requested]
    vmax = max(s.values.max() for s in snaps) or 1.0

    n = len(snaps)
    ncols = min(3, n)
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.0 * ncols, 3.4 * nrows),
                             squeeze=False)
    grid = manifest.grid
    extent = (grid["xmin"], grid["xmax"], grid["ymin"], grid["ymax"])
    im = None
    for ax, snap in zip(axes.ravel(), snaps):
        im = ax.imshow(snap.values.T, origin="lower", extent=extent,
                       vmin=0.0, vmax=vmax, cmap="inferno")
        ax.set_title(f"t = {snap.time:g}")
    for ax in axes.ravel()[n:]:
        ax.set_axis_off()
    fig.colorbar(im, ax=axes, shrink=0.85, label=field_name)
    fig.suptitle(title or f"{manifest.label}: {field_name}")
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{manifest.label}_snapshots.png"
    fig.savefig(out_path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)
    return out_path
