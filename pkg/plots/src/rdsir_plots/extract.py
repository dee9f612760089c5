"""Numeric extraction from run outputs, independent of any rendering.

Everything a figure claims (peak locations, terminal values, wave counts)
is computable here from the CSVs alone, so the claims can be asserted in
tests without producing an image.
"""

from __future__ import annotations

import numpy as np

from .readers import Manifest, read_snapshot


def argmax_path(manifest: Manifest, field: str = "I_plus_Istar") -> list[tuple[float, float, float]]:
    """(time, x, y) of the field's maximum across all snapshot times."""
    path = []
    for time in sorted(manifest.snapshot_times):
        snap = read_snapshot(manifest.snapshot_path(time, field))
        ix, iy = np.unravel_index(np.argmax(snap.values), snap.values.shape)
        path.append((time, float(snap.x[ix]), float(snap.y[iy])))
    return path


def closest_approach(path: list[tuple[float, float, float]],
                     point: tuple[float, float]) -> tuple[float, float]:
    """(distance, time) of the path's nearest pass to ``point``."""
    px, py = point
    best = min(path, key=lambda entry: np.hypot(entry[1] - px, entry[2] - py))
    return float(np.hypot(best[1] - px, best[2] - py)), best[0]


def local_maxima(values: np.ndarray) -> list[int]:
    values = np.asarray(values, dtype=float)
    return [k for k in range(1, len(values) - 1)
            if values[k] > values[k - 1] and values[k] > values[k + 1]]


def local_minima(values: np.ndarray) -> list[int]:
    return local_maxima(-np.asarray(values, dtype=float))


def initial_decline(values: np.ndarray, samples: int = 5) -> bool:
    values = np.asarray(values, dtype=float)
    return bool((np.diff(values[:samples]) < 0).all())


def terminal_value(series: dict[str, np.ndarray], column: str) -> float:
    return float(series[column][-1])
