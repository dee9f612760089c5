"""Acceptance suite: one test per criterion, one PASS line per criterion.

The six bundled regimes run once at full scale (128 x 128, dt = 0.01,
t_end = 200) in a session fixture and are shared by the mass-bound,
nonnegativity and phenomenology criteria. Run with ``-s`` to see the
PASS lines and timings as they happen.
"""

import time
from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg
from scipy.integrate import solve_ivp

from rdsir.cli import main as cli_main
from rdsir.diagnostics import field_argmax, local_maxima, local_minima
from rdsir.grid import GridSpec, ScalarField, apply_laplacian
from rdsir.scenario import preset
from rdsir.spectral import (
    classify_dfe,
    dfe_linearization_check,
    dfe_reproduction_number,
    dfe_steady_state,
    principal_eigenpair,
    reproduction_number,
    sign_consistency,
)
from rdsir.stepper import run_scenario
from rdsir.verification import spatial_self_convergence, temporal_self_convergence

from conftest import materialize_operator, smooth_field
from test_model import make_params

PRESETS = ("fig1", "fig3", "fig4", "fig5", "fig6", "basic_sir")

#: shared b = 0.02 on (-5,5)^2 and delta = 0.001 give ||b||_1/delta = 2000
BOUND_LEVEL = 2000.0


def report(criterion: int, name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    print(f"ACCEPTANCE {criterion:2d} {name}: {status}{suffix}")
    assert passed, f"criterion {criterion} ({name}) failed: {detail}"


@pytest.fixture(scope="session")
def preset_runs():
    """Full-scale trajectories of all bundled regimes, plus wall times."""
    import warnings

    runs = {}
    for name in PRESETS:
        cfg = preset(name)
        if name == "fig1":
            # dense snapshots so the infection-peak path can be scanned
            cfg.stepper.snapshot_times = tuple(np.arange(0.0, 200.5, 2.5))
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            # fig4's beta = 50 sits right at the dt heuristic's edge
            warnings.simplefilter("ignore", UserWarning)
            traj = run_scenario(cfg)
        wall = time.perf_counter() - t0
        print(f"[preset run] {name}: {wall:.1f}s, {traj.n_steps} steps")
        runs[name] = (cfg, traj, wall)
    return runs


def closed_form_r0_noncompliant(beta, b, gamma, nu, delta):
    return beta * (b / (nu + delta)) / (gamma + nu + delta)


def test_criterion_01_reproduction_numbers(tmp_path, capsys):
    """cmd_r0 reproduces the constant-coefficient closed forms."""
    expectations = {
        "fig3": closed_form_r0_noncompliant(0.1, 0.02, 1.0, 0.1, 0.001),
        "fig4": closed_form_r0_noncompliant(50.0, 0.02, 1.0, 0.1, 0.001),
    }
    worst_rel = 0.0
    worst_time = 0.0
    for name, expected in expectations.items():
        scenario = tmp_path / f"{name}.cfg"
        scenario.write_text(f"preset = {name}\n")
        t0 = time.perf_counter()
        code = cli_main(["r0", "--scenario", str(scenario)])
        elapsed = time.perf_counter() - t0
        out = capsys.readouterr().out
        values = dict(line.split("=", 1) for line in out.strip().splitlines())
        assert code == 0
        rel = abs(float(values["r0"]) - expected) / expected
        worst_rel = max(worst_rel, rel)
        worst_time = max(worst_time, elapsed)
        assert values["consistent"] == "true"
    with capsys.disabled():
        report(
            1, "reproduction numbers", worst_rel <= 1e-6 and worst_time < 5.0,
            f"max rel err {worst_rel:.2e}, max time {worst_time:.2f}s "
            f"(R0*(fig3)={expectations['fig3']:.5f}, R0*(fig4)={expectations['fig4']:.4f})",
        )


def test_criterion_02_sign_consistency():
    """sign(R - 1) matches sign(lambda) over randomized parameter draws."""
    rng = np.random.default_rng(42)
    grid = GridSpec(nx=32, ny=32)
    t0 = time.perf_counter()
    r_values = []
    agreements = []
    for k in range(20):
        target_r = 10.0 ** rng.uniform(-2.0, 1.0)   # spans [0.01, 10]
        which = "noncompliant" if k % 2 == 0 else "compliant"
        gamma = rng.uniform(0.2, 2.0)
        delta = rng.uniform(1e-3, 0.2)
        nu = rng.uniform(0.0, 2.0) if which == "noncompliant" else rng.uniform(0.0, 1.0)
        alpha = rng.uniform(0.0, 0.9) if which == "compliant" else rng.uniform(0.0, 1.0)
        b = rng.uniform(0.01, 0.5)
        d = rng.uniform(5e-3, 0.5)
        if which == "noncompliant":
            steady = b / (nu + delta)
            absorption = gamma + nu + delta
            beta = target_r * absorption / steady
            xi = 0.0
        else:
            steady = b / delta
            absorption = gamma + delta
            beta = target_r * absorption / ((1.0 - alpha) ** 2 * steady)
            xi = 1.0
        p = make_params(grid, beta=beta, gamma=gamma, delta=delta, alpha=alpha,
                        mu=rng.uniform(0.0, 2.0), nu=nu, xi=xi, birth=b, d=d)
        rep = sign_consistency(p, which)
        r_values.append(rep.r0)
        if abs(rep.r0 - 1.0) > 1e-3:
            agreements.append(rep.consistent)
    elapsed = time.perf_counter() - t0
    spans = (min(r_values) < 0.05, max(r_values) > 5.0)
    report(
        2, "sign consistency", all(agreements) and all(spans) and elapsed < 60.0,
        f"{len(agreements)} decisive draws all agree, R in "
        f"[{min(r_values):.3f}, {max(r_values):.2f}], {elapsed:.1f}s",
    )


def test_criterion_03_dense_oracle(rng):
    """Matrix-free eigen solvers match dense eigendecompositions at 1e-8."""
    grid = GridSpec(nx=16, ny=16)
    t0 = time.perf_counter()
    lap_dense = materialize_operator(lambda f: apply_laplacian(f, 1.0), grid)
    worst_eig = 0.0
    worst_r0 = 0.0
    for _ in range(10):
        d = rng.uniform(0.02, 0.3)
        c = smooth_field(grid, rng, amplitude=1.5)
        dense = d * lap_dense + np.diag(c.values.ravel())
        expected = np.linalg.eigvalsh(dense)[-1]
        got = principal_eigenpair(d, c).lam
        worst_eig = max(worst_eig, abs(got - expected))

        absorption = rng.uniform(0.3, 1.5)
        raw = smooth_field(grid, rng, amplitude=1.0)
        infectivity = ScalarField(grid, raw.values - raw.values.min() + 0.05)
        a_dense = np.diag(infectivity.values.ravel())
        b_dense = absorption * np.eye(grid.nx * grid.ny) - d * lap_dense
        expected_r = scipy.linalg.eigh(a_dense, b_dense, eigvals_only=True)[-1]
        got_r = reproduction_number(d, infectivity, absorption).value
        worst_r0 = max(worst_r0, abs(got_r - expected_r))
    elapsed = time.perf_counter() - t0
    report(
        3, "dense-oracle eigen equivalence",
        worst_eig <= 1e-8 and worst_r0 <= 1e-8 and elapsed < 30.0,
        f"max |d lambda| {worst_eig:.2e}, max |d R| {worst_r0:.2e}, {elapsed:.1f}s",
    )


def test_criterion_04_mass_bound(preset_runs):
    """Every full-scale regime respects the total-population bound."""
    tol = 1e-6 * BOUND_LEVEL
    worst = np.inf
    total_wall = 0.0
    for name, (cfg, traj, wall) in preset_runs.items():
        worst = min(worst, traj.column("bound_gap").min())
        total_wall += wall
    report(
        4, "mass bound", worst >= -tol and total_wall < 600.0,
        f"min gap {worst:.1f} (tol -{tol:.0e}), total wall {total_wall:.0f}s",
    )


def test_criterion_05_nonnegativity(preset_runs):
    """No compartment dips below -1e-10 of the running maximum."""
    worst_ratio = 0.0
    for name, (cfg, traj, wall) in preset_runs.items():
        min_value = traj.column("min_value").min()
        worst_ratio = max(worst_ratio, -min_value / traj.running_max)
    report(
        5, "nonnegativity", worst_ratio <= 1e-10,
        f"worst min/runmax ratio {worst_ratio:.2e}",
    )


def _stability_params(grid, beta):
    return make_params(grid, beta=beta, gamma=1.0, delta=0.1, alpha=0.5,
                       mu=1.0, nu=0.0, xi=0.0, birth=0.02, d=0.02)


def _stability_scenario(beta, nx=64):
    cfg = preset("fig4", nx=nx, ny=nx)   # reuse the population-center ICs
    cfg.params = _stability_params(cfg.grid, beta)
    cfg.stepper = replace(cfg.stepper, dt=0.01, t_end=200.0,
                          snapshot_times=(0.0, 200.0))
    cfg.label = f"stability_beta{beta:g}"
    return cfg


def test_criterion_06_subcritical_stability():
    """R0* < 1 with xi = 0, nu = 0: the disease-free profile attracts."""
    cfg = _stability_scenario(beta=2.0)
    r0 = dfe_reproduction_number(cfg.params, "noncompliant").value
    assert r0 < 1.0
    steady = dfe_steady_state(cfg.params, "noncompliant")
    traj = run_scenario(cfg)
    _, first = traj.snapshots[0]
    _, final = traj.snapshots[-1]
    infected = np.abs(final.I.values + final.Is.values).max()
    s_ratio = np.abs(final.S.values).max() / np.abs(first.S.values).max()
    steady_err = np.abs(final.Ss.values - steady.values).max() / steady.values.max()
    report(
        6, "subcritical stability",
        infected < 1e-4 and s_ratio < 1e-2 and steady_err < 1e-2,
        f"R0*={r0:.3f}, |I+I*|={infected:.1e}, |S|/|S0|={s_ratio:.1e}, "
        f"|S*-steady|/|steady|={steady_err:.1e}",
    )


def test_criterion_07_supercritical_persistence():
    """R0* > 2 in the same setting: infections persist."""
    cfg = _stability_scenario(beta=22.0)
    r0 = dfe_reproduction_number(cfg.params, "noncompliant").value
    assert r0 > 2.0
    traj = run_scenario(cfg)
    t = traj.times()
    infected = traj.column("infected_fraction")
    window = infected[np.searchsorted(t, 150.0):]
    report(
        7, "supercritical persistence", bool((window > 1e-3).all()),
        f"R0*={r0:.2f}, min infected fraction on [150,200] = {window.min():.4f}",
    )


def test_criterion_08_concentrated_outbreak_phenomenology(preset_runs):
    """Distinct initial bumps: decline, repeated waves, migration to origin."""
    cfg, traj, _ = preset_runs["fig1"]
    t = traj.times()
    infected = traj.column("infected_fraction")
    noncompliant = traj.column("noncompliant_fraction")

    initial_decline = bool((np.diff(infected[:5]) < 0).all())
    maxima = local_maxima(infected)
    final_noncompliant = noncompliant[-1]

    distances_33 = []
    distances_00 = []
    for t_snap, state in traj.snapshots:
        f = ScalarField(state.grid, state.I.values + state.Is.values)
        x, y = field_argmax(f)
        distances_33.append((t_snap, float(np.hypot(x - 3.0, y - 3.0))))
        distances_00.append((t_snap, float(np.hypot(x, y))))
    start_near_seed = distances_33[0][1] < 1.0
    closest_origin = min(distances_00, key=lambda pair: pair[1])

    passed = (
        initial_decline
        and len(maxima) >= 2
        and final_noncompliant > 0.5
        and start_near_seed
        and closest_origin[1] < 1.0
    )
    report(
        8, "concentrated-outbreak phenomenology", passed,
        f"decline={initial_decline}, {len(maxima)} maxima at "
        f"t={[round(t[k], 1) for k in maxima]}, final noncompliant "
        f"{final_noncompliant:.3f}, argmax starts {distances_33[0][1]:.2f} from "
        f"(3,3), reaches {closest_origin[1]:.2f} from origin at t={closest_origin[0]:g}",
    )


def test_criterion_09_noncompliance_dichotomy(preset_runs):
    """Weak noncompliance stays contained; strong noncompliance reignites."""
    _, contained, _ = preset_runs["fig5"]
    t5 = contained.times()
    inf5 = contained.column("infected_fraction")
    non5 = contained.column("noncompliant_fraction")
    after = np.searchsorted(t5, 20.0)     # past the initial transient
    contained_ok = (
        non5.max() < 0.1
        and bool((inf5[after:] < inf5[0]).all())
        and bool((np.diff(inf5[after:]) <= 1e-12).all())
    )

    _, outbreak, _ = preset_runs["fig6"]
    t6 = outbreak.times()
    inf6 = outbreak.column("infected_fraction")
    non6 = outbreak.column("noncompliant_fraction")
    minima = local_minima(inf6)
    maxima = local_maxima(inf6)
    resurgence = False
    if minima:
        k_min = minima[0]
        later = [k for k in maxima if k > k_min]
        resurgence = bool(later) and inf6[later[0]] > inf6[k_min]
    outbreak_ok = non6.max() > 0.5 and resurgence

    report(
        9, "noncompliance dichotomy", contained_ok and outbreak_ok,
        f"contained: max noncompliant {non5.max():.3f}, monotone after t=20; "
        f"outbreak: max noncompliant {non6.max():.3f}, min at "
        f"t={t6[minima[0]]:.0f} then max at "
        f"t={t6[[k for k in maxima if k > minima[0]][0]]:.0f}"
        if minima and outbreak_ok else "no resurgence found",
    )


def test_criterion_10_scheme_orders():
    """First order in time, second order in space, by self-convergence."""
    t0 = time.perf_counter()
    temporal = temporal_self_convergence(preset("fig1", nx=64, ny=64), dt=0.08, t_end=2.0)

    from rdsir.scenario import GaussianSeed, SingleGaussianIC

    smooth = preset("fig1", nx=16, ny=16)
    smooth.ic = SingleGaussianIC(center=(0.0, 0.0), amplitude=1.0, decay=1.0)
    smooth.infected_seed = GaussianSeed(center=(1.0, 1.0), amplitude=0.05, decay=1.0)
    spatial = spatial_self_convergence(smooth, nx=32, dt=0.002, t_end=1.0)
    elapsed = time.perf_counter() - t0
    passed = (
        0.8 <= temporal.order <= 1.2
        and 1.7 <= spatial.order <= 2.3
        and 1.6 <= temporal.reference_factor <= 2.4
        and 3.2 <= spatial.reference_factor <= 4.8
        and elapsed < 300.0
    )
    report(
        10, "scheme orders", passed,
        f"temporal {temporal.order:.3f} (ref factor {temporal.reference_factor:.2f}), "
        f"spatial {spatial.order:.3f} (ref factor {spatial.reference_factor:.2f}), "
        f"{elapsed:.0f}s",
    )


def test_criterion_11_well_mixed_ode_limit():
    """Large diffusion + uniform data reproduces the six-compartment ODE."""
    grid = GridSpec(nx=8, ny=8)
    p = make_params(grid, beta=3.0, gamma=0.5, delta=0.001, alpha=0.5,
                    mu=1.0, nu=1.0, xi=0.05, birth=0.02, d=10.0)

    # independently written scalar right-hand side (not the package's)
    def rhs(_t, y):
        S, I, R, Ss, Is, Rs = y
        pressure = 0.5 * I + Is
        nstar = Ss + Is + Rs
        return [
            0.05 * 0.02 - 3.0 * 0.5 * S * pressure - S * nstar + Ss - 0.001 * S,
            3.0 * 0.5 * S * pressure - 0.5 * I - I * nstar + Is - 0.001 * I,
            0.5 * I - R * nstar + Rs - 0.001 * R,
            0.95 * 0.02 - 3.0 * Ss * pressure + S * nstar - Ss - 0.001 * Ss,
            3.0 * Ss * pressure - 0.5 * Is + I * nstar - Is - 0.001 * Is,
            0.5 * Is + R * nstar - Rs - 0.001 * Rs,
        ]

    y0 = [1.0, 0.01, 0.0, 0.05, 0.0005, 0.0]
    reference = solve_ivp(rhs, (0.0, 50.0), y0, rtol=1e-11, atol=1e-14,
                          dense_output=True)

    # the same initial data expressed through the scenario surface:
    # uniform S = 1 with I = S/100 and a 1/20 noncompliant copy of each
    from rdsir.scenario import ProportionalSeed, ScenarioConfig, UniformIC
    from rdsir.stepper import StepperConfig

    sample_times = tuple(np.round(np.arange(0.1, 50.05, 0.1), 10))
    cfg = ScenarioConfig(
        grid=grid,
        params=p,
        stepper=StepperConfig(dt=1e-3, t_end=50.0, series_stride=10**6,
                              snapshot_times=sample_times),
        ic=UniformIC(level=1.0),
        infected_seed=ProportionalSeed(ratio=0.01),
        noncompliant_seed_fraction=0.05,
        label="well_mixed",
    )
    traj = run_scenario(cfg)
    times = np.array([t for t, _ in traj.snapshots])
    values = np.array([[f.values.flat[0] for f in state.fields()]
                       for _, state in traj.snapshots])
    uniform = max(
        float(np.abs(state.stack() - state.stack()[:, :1, :1]).max())
        for _, state in traj.snapshots
    )
    expected = reference.sol(times).T
    rel = float(np.abs(values - expected).max() / np.abs(expected).max())
    report(
        11, "well-mixed ODE limit", rel <= 1e-3 and uniform == 0.0,
        f"relative Linf {rel:.2e} over t in [0,50], fields exactly uniform",
    )


def test_criterion_12_linearization_conditions():
    """Cooperativity + stability of the linearization blocks at the DFEs.

    Each xi in {0,1} regime is checked at its classified disease-free case,
    which covers both cases across the presets: fig3/fig4 settle on the
    noncompliant profile (noncompliance invades their compliant profile,
    mu*max(S) > nu + delta, which is the regimes' entire point), basic_sir
    on the compliant one. basic_sir additionally passes both cases since it
    has no noncompliance transmission at all.
    """
    results = []
    cases_seen = set()
    for name in ("fig3", "fig4", "basic_sir"):
        p = preset(name, nx=32, ny=32).params
        which = classify_dfe(p)
        cases_seen.add(which)
        steady = dfe_steady_state(p, which)
        rep = dfe_linearization_check(steady, p, which)
        results.append((name, which, rep.passed, rep.max_real_eig_neg_v, rep.max_real_eig_m))

    p_basic = preset("basic_sir", nx=32, ny=32).params
    for which in ("compliant", "noncompliant"):
        steady = dfe_steady_state(p_basic, which)
        rep = dfe_linearization_check(steady, p_basic, which)
        results.append(("basic_sir", which, rep.passed, rep.max_real_eig_neg_v,
                        rep.max_real_eig_m))

    # informative: the compliant profile of fig3/fig4 is genuinely unstable
    # to noncompliance invasion; the check must detect that, not hide it
    p3 = preset("fig3", nx=32, ny=32).params
    invaded = dfe_linearization_check(
        dfe_steady_state(p3, "compliant"), p3, "compliant"
    )
    print(f"  (informative) fig3 compliant profile: cooperative_m="
          f"{invaded.cooperative_m}, max Re eig M = {invaded.max_real_eig_m:.2f} "
          "(noncompliance invades, as the regime intends)")

    all_passed = all(r[2] for r in results)
    both_cases = cases_seen == {"compliant", "noncompliant"}
    detail = "; ".join(f"{n}/{w}: maxRe(-V)={v:.3f}, maxRe(M)={m:.3f}"
                       for n, w, _, v, m in results)
    report(12, "linearization conditions", all_passed and both_cases, detail)
