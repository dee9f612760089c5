"""Scalar time-series diagnostics recorded along a trajectory.

Fractions are ratios of L1 norms and use absolute values inside the
integrals so that roundoff-scale negative cells (which the stepper
tolerates up to 1e-10 of the running maximum) cannot push a fraction
outside [0, 1]. Genuine negativity is monitored separately through
``min_value``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import EpidemicState


@dataclass
class SeriesRecord:
    """One sampled instant of the aggregate quantities."""

    time: float
    total_mass: float
    infected_fraction: float
    noncompliant_fraction: float
    min_value: float
    bound_gap: float

    #: column order used by the CSV writer and readers
    FIELDS = ("time", "total_mass", "infected_fraction",
              "noncompliant_fraction", "min_value", "bound_gap")


def _l1(values: np.ndarray, cell_area: float) -> float:
    return float(np.abs(values).sum() * cell_area)


def stack_aggregates(stack: np.ndarray, cell_area: float) -> tuple[float, float, float]:
    """(total mass, infected fraction, noncompliant fraction) of a raw stack.

    Single source for the fraction definitions; the stepper records through
    this to avoid rewrapping fields every sample.
    """
    total_field = stack.sum(axis=0)
    mass = float(total_field.sum() * cell_area)
    total_l1 = _l1(total_field, cell_area)
    if total_l1 <= 0.0:
        raise ValueError("population fractions undefined for zero total population")
    infected = _l1(stack[1] + stack[4], cell_area) / total_l1
    noncompliant = _l1(stack[3] + stack[4] + stack[5], cell_area) / total_l1
    return mass, infected, noncompliant


def infected_fraction(u: EpidemicState) -> float:
    """||I + I*||_L1 / ||S + I + R + S* + I* + R*||_L1."""
    return stack_aggregates(u.stack(), u.grid.cell_area)[1]


def noncompliant_fraction(u: EpidemicState) -> float:
    """||S* + I* + R*||_L1 / ||S + I + R + S* + I* + R*||_L1."""
    return stack_aggregates(u.stack(), u.grid.cell_area)[2]


def mass_bound_gap(times, masses, n0: float, b_l1: float, delta: float) -> np.ndarray:
    """Slack in the total-population bound at each sample.

    gap(t) = N(0) exp(-delta t) + ||b||_L1 / delta - total_mass(t). The
    bound holds along exact trajectories, so gaps more negative than
    -1e-6 * ||b||_L1 / delta indicate a scheme defect.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    times = np.asarray(times, dtype=float)
    masses = np.asarray(masses, dtype=float)
    return n0 * np.exp(-delta * times) + b_l1 / delta - masses


def local_maxima(values) -> list[int]:
    """Indices of strict interior local maxima of a sampled series."""
    v = np.asarray(values, dtype=float)
    out = []
    for k in range(1, len(v) - 1):
        if v[k] > v[k - 1] and v[k] > v[k + 1]:
            out.append(k)
    return out


def local_minima(values) -> list[int]:
    return local_maxima(-np.asarray(values, dtype=float))


def field_argmax(field) -> tuple[float, float]:
    """Coordinates of the cell center holding the field's maximum."""
    ix, iy = np.unravel_index(np.argmax(field.values), field.values.shape)
    return (float(field.grid.x_centers()[ix]), float(field.grid.y_centers()[iy]))
