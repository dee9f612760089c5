"""Self-convergence ladders for the semi-implicit scheme.

Two estimators are reported per ladder:

* ``order`` from successive differences (u_h vs u_{h/2} against u_{h/2} vs
  u_{h/4}), which is unbiased: the ratio tends to 2^p exactly.
* ``reference_factor`` = error(h) / error(h/2) measured against a much
  finer reference level. A finite reference inflates this ratio above 2^p
  by a known amount (7/3 instead of 2 for first order against a dt/8
  reference), so the reference here sits three halvings down.

The scheme is first order in time (implicit-Euler diffusion,
explicit-Euler reactions) and second order in space (centered stencil).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .scenario import ScenarioConfig, with_resolution
from .stepper import run_scenario


@dataclass
class ConvergenceReport:
    order: float
    step_errors: tuple[float, ...]       # successive-difference errors
    reference_errors: tuple[float, ...]  # errors against the finest level
    reference_factor: float
    exact: bool = False                  # all errors identically zero


def _run_final_stack(cfg: ScenarioConfig, dt: float, t_end: float) -> np.ndarray:
    cfg = replace(cfg, stepper=replace(cfg.stepper, dt=dt, t_end=t_end,
                                       snapshot_times=(t_end,), series_stride=10**9))
    traj = run_scenario(cfg)
    return traj.snapshots[-1][1].stack()


def _l2(stack: np.ndarray, cell_area: float) -> float:
    return float(np.sqrt((stack**2).sum() * cell_area))


def _report(levels: list[np.ndarray], areas: list[float]) -> ConvergenceReport:
    """Build the report from solutions at h, h/2, h/4 and the reference.

    ``levels`` holds the four solutions already mapped onto the grid of
    each coarser level where needed (temporal ladders share one grid).
    Errors below roundoff of the reference solution count as exact (the
    spectral solves leave ~1e-16 relative noise even on invariant data).
    """
    e_step = (
        _l2(levels[0][0] - levels[0][1], areas[0]),
        _l2(levels[1][0] - levels[1][1], areas[1]),
    )
    e_ref = (
        _l2(levels[0][0] - levels[0][2], areas[0]),
        _l2(levels[1][0] - levels[1][2], areas[1]),
    )
    floor = 1e-13 * max(_l2(levels[0][2], areas[0]), 1e-300)
    if all(e <= floor for e in e_step + e_ref):
        return ConvergenceReport(
            order=float("nan"), step_errors=e_step, reference_errors=e_ref,
            reference_factor=float("nan"), exact=True,
        )
    order = float(np.log2(max(e_step[0], floor) / max(e_step[1], floor)))
    factor = float(max(e_ref[0], floor) / max(e_ref[1], floor))
    return ConvergenceReport(
        order=order, step_errors=e_step, reference_errors=e_ref,
        reference_factor=factor,
    )


def temporal_self_convergence(
    cfg: ScenarioConfig, dt: float, t_end: float
) -> ConvergenceReport:
    """Ladder at dt, dt/2, dt/4 with a dt/8 reference, one grid throughout."""
    u = {k: _run_final_stack(cfg, dt / 2**k, t_end) for k in range(4)}
    area = cfg.grid.cell_area
    levels = [
        (u[0], u[1], u[3]),
        (u[1], u[2], u[3]),
    ]
    return _report(levels, [area, area])


def block_average(values: np.ndarray, factor: int) -> np.ndarray:
    """Conservative restriction: mean over factor x factor cell blocks."""
    nx, ny = values.shape
    if nx % factor or ny % factor:
        raise ValueError(f"shape {values.shape} not divisible by {factor}")
    return values.reshape(nx // factor, factor, ny // factor, factor).mean(axis=(1, 3))


def _restrict_stack(stack: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return stack
    return np.stack([block_average(stack[k], factor) for k in range(6)])


def spatial_self_convergence(
    cfg: ScenarioConfig, nx: int, dt: float, t_end: float
) -> ConvergenceReport:
    """Ladder at nx, 2nx, 4nx with an 8nx reference, one dt throughout.

    Differences are taken after block-average restriction onto the coarser
    grid of each pair, in that grid's quadrature L2 norm.
    """
    u = {}
    for k in range(4):
        n = nx * 2**k
        u[k] = _run_final_stack(with_resolution(cfg, n, n), dt, t_end)
    areas = [
        with_resolution(cfg, nx, nx).grid.cell_area,
        with_resolution(cfg, 2 * nx, 2 * nx).grid.cell_area,
    ]
    levels = [
        (u[0], _restrict_stack(u[1], 2), _restrict_stack(u[3], 8)),
        (u[1], _restrict_stack(u[2], 2), _restrict_stack(u[3], 4)),
    ]
    return _report(levels, areas)
