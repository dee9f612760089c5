"""Parsers for the simulator's on-disk outputs.

Deliberately standalone: this package reads the documented plain-text
formats (manifest.json, series.csv, snapshot CSVs) and shares no code with
the simulator, so it works against any producer of the same files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SERIES_COLUMNS = ("t", "total_mass", "infected_fraction",
                  "noncompliant_fraction", "min_value", "bound_gap")


class SchemaError(ValueError):
    """An input file does not match its documented schema."""


@dataclass
class Manifest:
    label: str
    directory: Path
    series_path: Path
    snapshot_times: list[float]
    snapshots: list[dict]        # {"time": float, "field": str, "path": str}
    grid: dict

    def snapshot_path(self, time: float, field: str) -> Path:
        for entry in self.snapshots:
            if entry["field"] == field and np.isclose(entry["time"], time):
                return self.directory / entry["path"]
        raise SchemaError(
            f"manifest for {self.label!r} lists no snapshot of {field!r} "
            f"at t = {time:g}; available times: {sorted(self.snapshot_times)}"
        )


@dataclass
class Snapshot:
    meta: dict
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray   # shape (nx, ny), axis 0 along x

    @property
    def time(self) -> float:
        return float(self.meta["time"])


def read_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    directory = path.parent
    try:
        return Manifest(
            label=data["label"],
            directory=directory,
            series_path=directory / data["series"],
            snapshot_times=[float(t) for t in data["snapshot_times"]],
            snapshots=data["snapshots"],
            grid=data["grid"],
        )
    except KeyError as exc:
        raise SchemaError(f"manifest {path} is missing key {exc}") from exc


def read_series(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    if not lines:
        raise SchemaError(f"series file {path} is empty")
    header = tuple(lines[0].split(","))
    if header != SERIES_COLUMNS:
        raise SchemaError(
            f"series file {path} has columns {header}, expected {SERIES_COLUMNS}"
        )
    if len(lines) < 3:
        raise SchemaError(f"series file {path} holds no samples beyond t = 0")
    table = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return {name: table[:, k] for k, name in enumerate(SERIES_COLUMNS)}


def read_snapshot(path: str | Path) -> Snapshot:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    if len(lines) < 3:
        raise SchemaError(f"snapshot file {path} is truncated")
    meta = {}
    for token in lines[0].split():
        if "=" not in token:
            raise SchemaError(f"snapshot file {path} has a malformed metadata line")
        key, value = token.split("=", 1)
        meta[key] = value if key == "field" else float(value)
    if not lines[1].startswith("y\\x,"):
        raise SchemaError(f"snapshot file {path} lacks the y\\x header row")
    x = np.array([float(v) for v in lines[1].split(",")[1:]])
    y = []
    rows = []
    for line in lines[2:]:
        cells = line.split(",")
        y.append(float(cells[0]))
        rows.append([float(v) for v in cells[1:]])
    values = np.array(rows).T      # rows are y, transpose to (nx, ny)
    nx, ny = int(meta.get("nx", values.shape[0])), int(meta.get("ny", values.shape[1]))
    if values.shape != (nx, ny):
        raise SchemaError(
            f"snapshot file {path} claims {nx}x{ny} but holds {values.shape}"
        )
    return Snapshot(meta=meta, x=x, y=np.array(y), values=values)
