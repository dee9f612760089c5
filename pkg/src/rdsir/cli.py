"""Command-line entry point and the on-disk output formats.

Subcommands: ``run`` (simulate and persist), ``r0`` (reproduction-number
report), ``steady-state`` (disease-free profile summary), ``convergence``
(self-convergence orders), ``sweep`` (Cartesian parameter products).

Exit codes: 0 success, 2 scenario/usage error, 3 solver failure,
4 invariant violation (negativity or mass bound), 5 I/O error.

Formats (all plain text so external tools need no shared code):

* ``series.csv``: header ``t,total_mass,infected_fraction,
  noncompliant_fraction,min_value,bound_gap``, one row per sample,
  values at 17 significant digits. Byte-identical across reruns of the
  same configuration on one platform.
* snapshot CSVs, one file per (time, field) pair plus the combined
  ``I_plus_Istar``: first line space-separated ``key=value`` grid
  metadata, second line ``y\\x`` followed by the x cell centers, then one
  row per y cell center (row-major over y).
* ``manifest.json``: label, config hash, file listing, solver statistics,
  wall-clock time, any CLI overrides.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import sys
import time
from pathlib import Path

import numpy as np

from .diagnostics import SeriesRecord
from .errors import InvariantViolationError, MassBoundError, ScenarioError, SolverError
from .grid import ScalarField
from .scenario import (
    ScenarioConfig,
    load_scenario,
    serialize_scenario,
    with_resolution,
)
from .spectral import (
    SignConsistencyReport,
    classify_dfe,
    dfe_absorption,
    dfe_infectivity,
    dfe_linearization_check,
    dfe_potential,
    dfe_reproduction_number,
    dfe_steady_state,
    infected_diffusion,
    principal_eigenpair,
)
from .stepper import Trajectory, run_scenario
from .verification import spatial_self_convergence, temporal_self_convergence

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_SOLVER = 3
EXIT_INVARIANT = 4
EXIT_IO = 5

#: relative slack allowed in the total-population bound, times ||b||_1/delta
MASS_BOUND_RTOL = 1e-6

_FIELD_NAMES = ("S", "I", "R", "Sstar", "Istar", "Rstar")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_series_csv(path: Path, series: list[SeriesRecord]) -> None:
    lines = ["t,total_mass,infected_fraction,noncompliant_fraction,min_value,bound_gap"]
    for r in series:
        lines.append(",".join(_fmt(v) for v in (
            r.time, r.total_mass, r.infected_fraction,
            r.noncompliant_fraction, r.min_value, r.bound_gap,
        )))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_snapshot_csv(path: Path, field: ScalarField, time_value: float, name: str) -> None:
    g = field.grid
    meta = (
        f"xmin={_fmt(g.xmin)} xmax={_fmt(g.xmax)} ymin={_fmt(g.ymin)} "
        f"ymax={_fmt(g.ymax)} nx={g.nx} ny={g.ny} time={_fmt(time_value)} field={name}"
    )
    header = "y\\x," + ",".join(_fmt(x) for x in g.x_centers())
    rows = [meta, header]
    y = g.y_centers()
    for j in range(g.ny):
        rows.append(_fmt(y[j]) + "," + ",".join(_fmt(v) for v in field.values[:, j]))
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


def _snapshot_filename(time_value: float, name: str) -> str:
    return f"snapshot_t{time_value:010.4f}_{name}.csv"


def write_run_outputs(
    out_dir: Path, cfg: ScenarioConfig, traj: Trajectory,
    wall_time: float, overrides: dict,
) -> dict:
    """Persist series, snapshots, scenario and manifest; return the manifest."""
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario_text = serialize_scenario(cfg)
    (out_dir / "scenario.cfg").write_text(scenario_text, encoding="utf-8")
    write_series_csv(out_dir / "series.csv", traj.series)

    snapshots = []
    for t_snap, state in traj.snapshots:
        for name, field in zip(_FIELD_NAMES, state.fields()):
            fname = _snapshot_filename(t_snap, name)
            write_snapshot_csv(out_dir / fname, field, t_snap, name)
            snapshots.append({"time": t_snap, "field": name, "path": fname})
        combined = ScalarField(state.grid, state.I.values + state.Is.values)
        fname = _snapshot_filename(t_snap, "I_plus_Istar")
        write_snapshot_csv(out_dir / fname, combined, t_snap, "I_plus_Istar")
        snapshots.append({"time": t_snap, "field": "I_plus_Istar", "path": fname})

    manifest = {
        "label": cfg.label,
        "config_hash": hashlib.sha256(scenario_text.encode()).hexdigest(),
        "scenario_file": "scenario.cfg",
        "series": "series.csv",
        "snapshot_times": [t for t, _ in traj.snapshots],
        "snapshots": snapshots,
        "grid": {"nx": cfg.grid.nx, "ny": cfg.grid.ny,
                 "xmin": cfg.grid.xmin, "xmax": cfg.grid.xmax,
                 "ymin": cfg.grid.ymin, "ymax": cfg.grid.ymax},
        "solver_stats": {
            "n_steps": traj.n_steps,
            "dt": traj.dt,
            "max_residual": traj.max_residual,
            "running_max": traj.running_max,
            "wall_time_s": wall_time,
        },
        "overrides": overrides,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return manifest


def _check_mass_bound(cfg: ScenarioConfig, traj: Trajectory) -> None:
    b_l1 = float(np.abs(cfg.params.birth.values).sum() * cfg.grid.cell_area)
    tol = MASS_BOUND_RTOL * b_l1 / cfg.params.delta
    worst = min(r.bound_gap for r in traj.series)
    if worst < -tol:
        raise MassBoundError(
            f"total-population bound violated: min gap {worst:.6e} < -{tol:.3e}"
        )


def _apply_overrides(cfg: ScenarioConfig, args) -> tuple[ScenarioConfig, dict]:
    overrides = {}
    if getattr(args, "grid", None):
        cfg = with_resolution(cfg, args.grid, args.grid)
        overrides["grid"] = args.grid
    stepper_kv = {}
    if getattr(args, "dt", None):
        stepper_kv["dt"] = args.dt
        overrides["dt"] = args.dt
    if getattr(args, "t_end", None):
        stepper_kv["t_end"] = args.t_end
        stepper_kv["snapshot_times"] = tuple(
            t for t in cfg.stepper.snapshot_times if t <= args.t_end
        )
        overrides["t_end"] = args.t_end
    if stepper_kv:
        from dataclasses import replace

        cfg = replace(cfg, stepper=replace(cfg.stepper, **stepper_kv))
    return cfg, overrides


def cmd_run(args) -> int:
    cfg = load_scenario(args.scenario)
    cfg, overrides = _apply_overrides(cfg, args)
    t0 = time.perf_counter()
    traj = run_scenario(cfg)
    wall = time.perf_counter() - t0
    _check_mass_bound(cfg, traj)
    manifest = write_run_outputs(Path(args.out), cfg, traj, wall, overrides)
    print(f"label={manifest['label']}")
    print(f"out={args.out}")
    print(f"n_steps={manifest['solver_stats']['n_steps']}")
    print(f"wall_time_s={wall:.3f}")
    return EXIT_OK


def _resolve_case(cfg: ScenarioConfig, requested: str) -> str:
    if requested != "auto":
        return requested
    return classify_dfe(cfg.params)


def cmd_r0(args) -> int:
    cfg = load_scenario(args.scenario)
    p = cfg.params
    if p.xi not in (0.0, 1.0):
        print(
            f"error: xi = {p.xi} is strictly between 0 and 1; no disease-free "
            "steady profile exists in closed form (set xi to 0 or 1)",
            file=sys.stderr,
        )
        return EXIT_SCENARIO
    which = _resolve_case(cfg, args.case)
    steady = dfe_steady_state(p, which)
    eig = principal_eigenpair(infected_diffusion(p, which), dfe_potential(p, steady, which))
    r0 = dfe_reproduction_number(p, which)
    check = dfe_linearization_check(steady, p, which)
    report = SignConsistencyReport(which=which, lam=eig.lam, r0=r0.value)
    print(f"case={which}")
    print(f"r0={_fmt(r0.value)}")
    print(f"lambda={_fmt(eig.lam)}")
    print(f"steady_min={_fmt(steady.min())}")
    print(f"steady_max={_fmt(steady.max())}")
    print(f"linearization_ok={'true' if check.passed else 'false'}")
    print(f"consistent={'true' if report.consistent else 'false'}")
    return EXIT_OK


def cmd_steady_state(args) -> int:
    cfg = load_scenario(args.scenario)
    p = cfg.params
    if p.xi not in (0.0, 1.0):
        print(
            f"error: xi = {p.xi} is strictly between 0 and 1; set xi to 0 or 1",
            file=sys.stderr,
        )
        return EXIT_SCENARIO
    which = _resolve_case(cfg, args.case)
    steady = dfe_steady_state(p, which)
    print(f"case={which}")
    print(f"rate={_fmt(p.nu + p.delta if which == 'noncompliant' else p.delta)}")
    print(f"steady_min={_fmt(steady.min())}")
    print(f"steady_max={_fmt(steady.max())}")
    print(f"steady_mean={_fmt(float(steady.values.mean()))}")
    print(f"infectivity_max={_fmt(dfe_infectivity(p, steady, which).max())}")
    print(f"absorption={_fmt(dfe_absorption(p, which))}")
    if args.out:
        write_snapshot_csv(Path(args.out), steady, 0.0, f"steady_{which}")
        print(f"out={args.out}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = load_scenario(args.scenario)
    temporal_cfg = with_resolution(cfg, args.grid, args.grid)
    temporal = temporal_self_convergence(temporal_cfg, dt=args.dt, t_end=args.t_end)
    spatial = spatial_self_convergence(
        cfg, nx=args.spatial_base, dt=args.spatial_dt, t_end=args.spatial_t_end
    )
    for name, rep in (("temporal", temporal), ("spatial", spatial)):
        if rep.exact:
            print(f"{name}_order=exact")
            print(f"{name}_factor=exact")
        else:
            print(f"{name}_order={rep.order:.4f}")
            print(f"{name}_factor={rep.reference_factor:.4f}")
    return EXIT_OK


def _parse_sweep_sets(items: list[str]) -> dict[str, list[str]]:
    axes: dict[str, list[str]] = {}
    for item in items:
        if "=" not in item:
            raise ScenarioError(f"--set expects key=v1,v2,..., got {item!r}")
        key, values = item.split("=", 1)
        key = key.strip()
        axes[key] = [v.strip() for v in values.split(",") if v.strip()]
        if not axes[key]:
            raise ScenarioError(f"--set {key} lists no values")
    return axes


def cmd_sweep(args) -> int:
    base_text = Path(args.scenario).read_text(encoding="utf-8")
    axes = _parse_sweep_sets(args.set or [])
    if not axes:
        raise ScenarioError("sweep requires at least one --set key=v1,v2,...")
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    keys = sorted(axes)
    index = []
    for counter, combo in enumerate(itertools.product(*(axes[k] for k in keys))):
        point = dict(zip(keys, combo))
        text = base_text
        for key, value in point.items():
            text += f"\n{key} = {value}"
        cfg = load_scenario_text(text)
        cfg.label = f"{cfg.label}_point{counter:03d}"
        cfg, overrides = _apply_overrides(cfg, args)
        point_dir = out_root / f"point{counter:03d}"
        t0 = time.perf_counter()
        traj = run_scenario(cfg)
        wall = time.perf_counter() - t0
        _check_mass_bound(cfg, traj)
        write_run_outputs(point_dir, cfg, traj, wall, {**overrides, **point})
        index.append({"point": point, "dir": point_dir.name})
        print(f"point{counter:03d}: " + " ".join(f"{k}={v}" for k, v in point.items()))
    (out_root / "sweep_index.json").write_text(
        json.dumps(index, indent=2) + "\n", encoding="utf-8"
    )
    return EXIT_OK


def load_scenario_text(text: str) -> ScenarioConfig:
    from .scenario import parse_scenario

    return parse_scenario(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdsir",
        description="Reaction-diffusion SIR with noncompliance: simulate and analyze.",
        epilog="Exit codes: 0 ok, 2 scenario error, 3 solver failure, "
               "4 invariant violation, 5 I/O error.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and persist CSV outputs")
    run.add_argument("--scenario", required=True, help="scenario file path")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--dt", type=float, help="override stepper.dt")
    run.add_argument("--t-end", dest="t_end", type=float, help="override stepper.t_end")
    run.add_argument("--grid", type=int, help="override grid to N x N")
    run.set_defaults(func=cmd_run)

    r0 = sub.add_parser("r0", help="reproduction number and sign-consistency report")
    r0.add_argument("--scenario", required=True)
    r0.add_argument("--case", choices=("auto", "compliant", "noncompliant"),
                    default="auto",
                    help="disease-free regime; auto classifies from the parameters")
    r0.set_defaults(func=cmd_r0)

    steady = sub.add_parser("steady-state", help="disease-free steady profile summary")
    steady.add_argument("--scenario", required=True)
    steady.add_argument("--case", choices=("auto", "compliant", "noncompliant"),
                        default="auto")
    steady.add_argument("--out", help="write the profile as a snapshot CSV")
    steady.set_defaults(func=cmd_steady_state)

    conv = sub.add_parser("convergence", help="temporal and spatial self-convergence")
    conv.add_argument("--scenario", required=True)
    conv.add_argument("--grid", type=int, default=64, help="temporal-ladder grid size")
    conv.add_argument("--dt", type=float, default=0.08, help="coarsest dt in the ladder")
    conv.add_argument("--t-end", dest="t_end", type=float, default=2.0)
    conv.add_argument("--spatial-base", type=int, default=16,
                      help="coarsest spatial grid (ladder runs up to 8x this)")
    conv.add_argument("--spatial-dt", type=float, default=0.002)
    conv.add_argument("--spatial-t-end", dest="spatial_t_end", type=float, default=1.0)
    conv.set_defaults(func=cmd_convergence)

    sweep = sub.add_parser("sweep", help="Cartesian product of parameter overrides")
    sweep.add_argument("--scenario", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--set", action="append", metavar="KEY=V1,V2,...",
                       help="scenario key with comma-separated values; repeatable")
    sweep.add_argument("--dt", type=float, help="override stepper.dt for all points")
    sweep.add_argument("--t-end", dest="t_end", type=float)
    sweep.add_argument("--grid", type=int)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
