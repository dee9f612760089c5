"""Semi-implicit time integration: implicit diffusion, explicit reactions.

Each step solves, per compartment X with diffusion coefficient d_X,

    (Id - dt * d_X * Lap_h) X^{n+1} = X^n + dt * reaction_X(u^n),

a constant-coefficient Helmholtz problem under the zero-flux closure. The
cell-centered mirror-ghost stencil is diagonalized exactly by the type-II
cosine transform, so the solve is direct: one forward transform, a
pointwise division by the operator symbol, one inverse transform. The
residual contract (relative residual <= solver_tol) is still verified in
real space: on every public solve, and sampled inside long runs.

No positivity clipping is applied anywhere: a compartment dipping below
-1e-10 times the running maximum aborts the run with NegativityError so
that the scheme's nonnegativity cannot be silently repaired.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .diagnostics import SeriesRecord, stack_aggregates
from .errors import NegativityError, SingularOperatorError, SolverError
from .grid import GridSpec, ScalarField, laplacian_array
from .model import EpidemicState, ModelParams, reaction_stack

#: Relative tolerance used for the numerical nonnegativity invariant.
NEGATIVITY_TOL = 1e-10

#: Explicit terms should satisfy dt * (fastest rate) <= this, else we warn.
STABILITY_MARGIN = 0.5

#: Long runs sample the (direct) solve's residual contract at this stride.
_RESIDUAL_CHECK_STRIDE = 50


@dataclass
class StepperConfig:
    """Time-stepping controls for a scenario run."""

    dt: float = 0.01
    t_end: float = 200.0
    solver_tol: float = 1e-10
    snapshot_times: tuple[float, ...] = ()
    series_stride: int = 10

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < self.dt:
            raise ValueError(f"t_end must be at least dt, got {self.t_end} < {self.dt}")
        if not 0.0 < self.solver_tol <= 1e-4:
            raise ValueError(f"solver_tol must lie in (0, 1e-4], got {self.solver_tol}")
        if self.series_stride < 1:
            raise ValueError("series_stride must be a positive integer")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_end:
                raise ValueError(f"snapshot time {t} outside [0, t_end]")


@dataclass
class Trajectory:
    """Diagnostics series plus full-state snapshots from one run."""

    series: list[SeriesRecord] = field(default_factory=list)
    snapshots: list[tuple[float, EpidemicState]] = field(default_factory=list)
    n_steps: int = 0
    dt: float = 0.0
    max_residual: float = 0.0
    running_max: float = 0.0    # largest cell value seen over the whole run

    def times(self) -> np.ndarray:
        return np.array([r.time for r in self.series])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.series])


def _neumann_symbol(grid: GridSpec) -> np.ndarray:
    """Eigenvalues of -Lap_h in the cosine basis, shape (nx, ny), >= 0."""
    lx = (2.0 - 2.0 * np.cos(np.pi * np.arange(grid.nx) / grid.nx)) / grid.hx**2
    ly = (2.0 - 2.0 * np.cos(np.pi * np.arange(grid.ny) / grid.ny)) / grid.hy**2
    return lx[:, None] + ly[None, :]


def helmholtz_solve(
    rhs: ScalarField,
    a: float,
    d: float,
    solver_tol: float = 1e-10,
) -> ScalarField:
    """Solve (a * Id - d * Lap_h) u = rhs under the zero-flux closure.

    The operator is symmetric positive definite for a > 0. With a = 0 the
    constant mode is in the kernel and the problem is reported as singular
    rather than being regularized.
    """
    if a < 0:
        raise ValueError(f"absorption a must be nonnegative, got {a}")
    if d <= 0:
        raise ValueError(f"diffusion d must be positive, got {d}")
    if a == 0.0:
        raise SingularOperatorError(
            "a = 0 makes the pure Neumann operator singular (constant kernel)"
        )
    grid = rhs.grid
    symbol = a + d * _neumann_symbol(grid)
    u = fft.idctn(fft.dctn(rhs.values, type=2) / symbol, type=2)

    residual = a * u - d * laplacian_array(u, grid.hx, grid.hy) - rhs.values
    rel = np.linalg.norm(residual) / max(np.linalg.norm(rhs.values), 1e-300)
    if rel > solver_tol:
        raise SolverError(f"helmholtz solve residual {rel:.3e} exceeds tol {solver_tol:.3e}")
    return ScalarField(grid, u)


class _ImexStepSolver:
    """Prefactored implicit-diffusion solves for all six compartments."""

    def __init__(self, grid: GridSpec, diffusion: tuple[float, ...], dt: float):
        self.grid = grid
        self.dt = dt
        sym = _neumann_symbol(grid)
        self.inv_denominators = np.stack([1.0 / (1.0 + dt * d * sym) for d in diffusion])
        self.diffusion = np.asarray(diffusion)

    def advance(
        self, stack: np.ndarray, p: ModelParams, check_residual: bool = True
    ) -> tuple[np.ndarray, float]:
        """One IMEX-Euler step on a stacked state; returns (new stack, residual).

        The solve is a direct diagonalization, so the optional residual
        check only guards against data corruption; long runs sample it.
        """
        rhs = reaction_stack(stack, p)
        rhs *= self.dt
        rhs += stack
        coeffs = fft.dctn(rhs, type=2, axes=(1, 2))
        coeffs *= self.inv_denominators
        new = fft.idctn(coeffs, type=2, axes=(1, 2))
        if not check_residual:
            return new, 0.0
        lap = laplacian_array(new, self.grid.hx, self.grid.hy)
        residual = new - self.dt * self.diffusion[:, None, None] * lap - rhs
        rel = np.linalg.norm(residual) / max(np.linalg.norm(rhs), 1e-300)
        return new, float(rel)


def imex_step(u: EpidemicState, p: ModelParams, dt: float, solver_tol: float = 1e-10) -> EpidemicState:
    """Advance the state by one semi-implicit Euler step of size dt.

    Raises NegativityError if any compartment dips below
    -1e-10 * max(state) afterwards; nothing is clipped.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    solver = _ImexStepSolver(u.grid, p.diffusion(), dt)
    stack, rel = solver.advance(u.stack(), p)
    if rel > solver_tol:
        raise SolverError(f"implicit step residual {rel:.3e} exceeds tol {solver_tol:.3e}")
    new = EpidemicState.from_stack(u.grid, stack, u.time + dt)
    floor = -NEGATIVITY_TOL * max(u.max_value(), new.max_value())
    if new.min_value() < floor:
        raise NegativityError(
            f"compartment minimum {new.min_value():.3e} below tolerance {floor:.3e}",
            time=new.time,
        )
    return new


def stability_rate(p: ModelParams, state_max: float) -> float:
    """Fastest explicit rate entering the dt heuristic."""
    return max(p.beta * state_max, p.mu * state_max, p.gamma, p.delta, p.nu)


def run_scenario(cfg) -> Trajectory:
    """Run a full scenario and collect diagnostics and snapshots.

    The nominal dt is shrunk (never grown) to divide t_end evenly, so the
    final step always lands exactly on t_end. Diagnostics are sampled at
    t = 0, every ``series_stride`` steps, and at the final step; snapshots
    are taken at the step times nearest the requested snapshot_times.
    """
    from .scenario import ScenarioConfig, build_initial_state  # cycle: scenario builds states

    if not isinstance(cfg, ScenarioConfig):
        raise TypeError(f"expected ScenarioConfig, got {type(cfg).__name__}")
    p = cfg.params
    sc = cfg.stepper
    n_steps = max(1, int(np.ceil(sc.t_end / sc.dt - 1e-9)))
    dt = sc.t_end / n_steps

    state0 = build_initial_state(cfg)
    grid = state0.grid
    stack = state0.stack()

    rate = stability_rate(p, float(stack.max()))
    if dt * rate > STABILITY_MARGIN:
        warnings.warn(
            f"dt = {dt:g} resolves the fastest explicit rate {rate:g} with "
            f"dt*rate = {dt * rate:.3g} > {STABILITY_MARGIN}; expect accuracy loss",
            stacklevel=2,
        )

    b_l1 = float(np.abs(p.birth.values).sum() * grid.cell_area)
    bound_level = b_l1 / p.delta

    snapshot_steps: dict[int, float] = {}
    for t_snap in cfg.stepper.snapshot_times:
        snapshot_steps[int(round(t_snap / dt))] = t_snap

    solver = _ImexStepSolver(grid, p.diffusion(), dt)
    traj = Trajectory(dt=dt, n_steps=n_steps)

    n0 = float(stack.sum() * grid.cell_area)
    running_max = float(stack.max())

    def record(step: int, current: np.ndarray) -> None:
        t = step * dt
        mass, infected, noncompliant = stack_aggregates(current, grid.cell_area)
        traj.series.append(
            SeriesRecord(
                time=t,
                total_mass=mass,
                infected_fraction=infected,
                noncompliant_fraction=noncompliant,
                min_value=float(current.min()),
                bound_gap=n0 * float(np.exp(-p.delta * t)) + bound_level - mass,
            )
        )

    record(0, stack)
    if 0 in snapshot_steps:
        traj.snapshots.append((0.0, EpidemicState.from_stack(grid, stack, 0.0)))

    for step in range(1, n_steps + 1):
        check = step % _RESIDUAL_CHECK_STRIDE == 1 or step == n_steps
        stack, rel = solver.advance(stack, p, check_residual=check)
        if check:
            traj.max_residual = max(traj.max_residual, rel)
            if rel > sc.solver_tol:
                raise SolverError(
                    f"implicit step residual {rel:.3e} exceeds tol {sc.solver_tol:.3e} "
                    f"at t = {step * dt:g}"
                )
        running_max = max(running_max, float(stack.max()))
        smallest = float(stack.min())
        if smallest < -NEGATIVITY_TOL * running_max:
            raise NegativityError(
                f"compartment minimum {smallest:.3e} below tolerance "
                f"{-NEGATIVITY_TOL * running_max:.3e}",
                time=step * dt,
            )
        if step % sc.series_stride == 0 or step == n_steps:
            record(step, stack)
        if step in snapshot_steps:
            traj.snapshots.append((step * dt, EpidemicState.from_stack(grid, stack, step * dt)))

    traj.running_max = running_max
    return traj
