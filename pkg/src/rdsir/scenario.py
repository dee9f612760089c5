"""Scenario configuration: presets, initial conditions, and the file format.

A scenario file is flat UTF-8 ``key = value`` text with ``#`` comments and
dotted section prefixes (``params.beta``, ``stepper.dt``, ...). A ``preset``
key expands one of the bundled parameter regimes first; any other keys then
override individual fields. ``serialize_scenario`` emits the canonical full
form and round-trips exactly through ``parse_scenario``.

Initial-condition conventions: the recipe defines the compliant susceptible
density S0 and the infected seed defines I0 (either its own Gaussian bump or
a fixed proportion of S0). The noncompliant compartments start as a separate
population S*0 = f * S0 and I*0 = f * I0 with seed fraction f (default 1/20,
i.e. noncompliants are 1/21 of everyone), and both recovered compartments
start at zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ScenarioError
from .grid import GridSpec, ScalarField
from .model import EpidemicState, ModelParams
from .stepper import StepperConfig

PRESET_NAMES = ("fig1", "fig3", "fig4", "fig5", "fig6", "basic_sir")


@dataclass(frozen=True)
class SingleGaussianIC:
    center: tuple[float, float] = (0.0, 0.0)
    amplitude: float = 1.0
    decay: float = 5.0

    kind = "single_gaussian"


@dataclass(frozen=True)
class FourGaussiansIC:
    centers: tuple[tuple[float, float], ...] = (
        (-2.5, -2.5), (2.5, -2.5), (-2.5, 2.5), (2.5, 2.5),
    )
    amplitudes: tuple[float, ...] = (1.0, 0.8, 0.6, 0.9)
    decays: tuple[float, ...] = (2.0, 3.0, 2.5, 4.0)

    kind = "four_gaussians"

    def __post_init__(self):
        if not (len(self.centers) == len(self.amplitudes) == len(self.decays) == 4):
            raise ValueError("four_gaussians takes exactly 4 centers, amplitudes, decays")


@dataclass(frozen=True)
class UniformIC:
    level: float = 0.0

    kind = "uniform"


@dataclass(frozen=True)
class FileIC:
    path: str = ""

    kind = "file"


@dataclass(frozen=True)
class GaussianSeed:
    """Infected seed placed independently of S0 (the single-bump scenario)."""

    center: tuple[float, float] = (3.0, 3.0)
    amplitude: float = 0.05
    decay: float = 5.0

    kind = "gaussian"


@dataclass(frozen=True)
class ProportionalSeed:
    """Infected seed distributed identically to S0: I0 = ratio * S0."""

    ratio: float = 0.01

    kind = "proportional"


InitialCondition = SingleGaussianIC | FourGaussiansIC | UniformIC | FileIC
InfectedSeed = GaussianSeed | ProportionalSeed


@dataclass
class ScenarioConfig:
    """Everything needed to reproduce one simulation."""

    grid: GridSpec
    params: ModelParams
    stepper: StepperConfig
    ic: InitialCondition
    infected_seed: InfectedSeed
    noncompliant_seed_fraction: float = 0.05
    label: str = "scenario"

    def __post_init__(self):
        if not 0.0 <= self.noncompliant_seed_fraction < 1.0:
            raise ValueError(
                f"noncompliant_seed_fraction must lie in [0, 1), "
                f"got {self.noncompliant_seed_fraction}"
            )
        if self.params.grid != self.grid:
            raise ValueError("params.birth lives on a different grid than the scenario")


def gaussian_field(
    grid: GridSpec,
    center: tuple[float, float],
    amplitude: float,
    decay: float,
) -> ScalarField:
    """amplitude * exp(-decay * |x - center|^2) sampled at cell centers."""
    if decay <= 0:
        raise ValueError(f"decay must be positive, got {decay}")
    if amplitude < 0:
        raise ValueError(f"amplitude must be nonnegative, got {amplitude}")
    cx, cy = center
    if not (grid.xmin <= cx <= grid.xmax and grid.ymin <= cy <= grid.ymax):
        warnings.warn(f"gaussian center {center} lies outside the domain", stacklevel=2)
    X, Y = grid.meshgrid()
    return ScalarField(grid, amplitude * np.exp(-decay * ((X - cx) ** 2 + (Y - cy) ** 2)))


def _susceptible_field(cfg: ScenarioConfig) -> ScalarField:
    ic = cfg.ic
    if isinstance(ic, SingleGaussianIC):
        return gaussian_field(cfg.grid, ic.center, ic.amplitude, ic.decay)
    if isinstance(ic, FourGaussiansIC):
        total = np.zeros(cfg.grid.shape)
        for c, a, k in zip(ic.centers, ic.amplitudes, ic.decays):
            total += gaussian_field(cfg.grid, c, a, k).values
        return ScalarField(cfg.grid, total)
    if isinstance(ic, UniformIC):
        return ScalarField.full(cfg.grid, ic.level)
    if isinstance(ic, FileIC):
        values = np.loadtxt(ic.path, delimiter=",")
        if values.shape != cfg.grid.shape:
            raise ScenarioError(
                f"field file {ic.path} has shape {values.shape}, grid is {cfg.grid.shape}"
            )
        return ScalarField(cfg.grid, values)
    raise TypeError(f"unknown initial condition {ic!r}")


def build_initial_state(cfg: ScenarioConfig) -> EpidemicState:
    """Construct the t = 0 state from the scenario's recipes."""
    s0 = _susceptible_field(cfg)
    seed = cfg.infected_seed
    if isinstance(seed, GaussianSeed):
        i0 = gaussian_field(cfg.grid, seed.center, seed.amplitude, seed.decay)
    elif isinstance(seed, ProportionalSeed):
        i0 = ScalarField(cfg.grid, seed.ratio * s0.values)
    else:
        raise TypeError(f"unknown infected seed {seed!r}")
    f = cfg.noncompliant_seed_fraction
    zeros = ScalarField.zeros(cfg.grid)
    return EpidemicState(
        S=s0,
        I=i0,
        R=zeros.copy(),
        Ss=ScalarField(cfg.grid, f * s0.values),
        Is=ScalarField(cfg.grid, f * i0.values),
        Rs=zeros.copy(),
        time=0.0,
    )


# Shared regime table: (beta, gamma, alpha, mu, nu, xi); all bundled
# regimes use b = 0.02, delta = 0.001 and d = 0.02 for every compartment.
_PRESET_RATES = {
    "fig1": (3.0, 0.5, 0.5, 1.0, 1.0, 0.05),
    "fig3": (0.1, 1.0, 0.1, 1.0, 0.1, 1.0),
    "fig4": (50.0, 1.0, 0.8, 1.0, 0.1, 0.0),
    "fig5": (1.0, 1.0, 0.5, 0.1, 10.0, 0.05),
    "fig6": (1.0, 1.0, 0.5, 2.0, 1.0, 0.05),
    "basic_sir": (3.0, 0.5, 0.0, 0.0, 0.0, 1.0),
}
_PRESET_BIRTH = 0.02
_PRESET_DELTA = 0.001
_PRESET_DIFFUSION = 0.02


def preset(name: str, nx: int = 128, ny: int = 128) -> ScenarioConfig:
    """One of the bundled simulation regimes on the (-5, 5)^2 domain.

    fig1/basic_sir use the concentrated initial data (susceptibles in one
    bump at the origin, infections seeded at (3, 3)); the others share the
    four-population-center initial data with I0 = S0 / 100.
    """
    if name not in _PRESET_RATES:
        raise ScenarioError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")
    beta, gamma, alpha, mu, nu, xi = _PRESET_RATES[name]
    grid = GridSpec(nx=nx, ny=ny)
    params = ModelParams(
        beta=beta,
        gamma=gamma,
        delta=_PRESET_DELTA,
        alpha=alpha,
        mu=mu,
        nu=nu,
        xi=xi,
        birth=ScalarField.full(grid, _PRESET_BIRTH),
        d_s=_PRESET_DIFFUSION,
        d_i=_PRESET_DIFFUSION,
        d_r=_PRESET_DIFFUSION,
        d_ss=_PRESET_DIFFUSION,
        d_is=_PRESET_DIFFUSION,
        d_rs=_PRESET_DIFFUSION,
    )
    if name in ("fig1", "basic_sir"):
        ic: InitialCondition = SingleGaussianIC(center=(0.0, 0.0), amplitude=1.0, decay=5.0)
        seed: InfectedSeed = GaussianSeed(center=(3.0, 3.0), amplitude=1.0 / 20.0, decay=5.0)
        # panels: seeded bump, decay, pre-resurgence, wave crossing the
        # origin, late concentration, final state
        snapshot_times = (0.0, 25.0, 50.0, 67.5, 105.0, 200.0)
    else:
        ic = FourGaussiansIC()
        seed = ProportionalSeed(ratio=0.01)
        snapshot_times = (0.0, 200.0)
    return ScenarioConfig(
        grid=grid,
        params=params,
        stepper=StepperConfig(dt=0.01, t_end=200.0, snapshot_times=snapshot_times),
        ic=ic,
        infected_seed=seed,
        noncompliant_seed_fraction=0.0 if name == "basic_sir" else 0.05,
        label=name,
    )


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_GRID_KEYS = {"xmin", "xmax", "ymin", "ymax", "nx", "ny"}
_PARAM_KEYS = {"beta", "gamma", "delta", "alpha", "mu", "nu", "xi", "birth",
               "d", "d_s", "d_i", "d_r", "d_ss", "d_is", "d_rs"}
_STEPPER_KEYS = {"dt", "t_end", "solver_tol", "series_stride", "snapshot_times"}
_IC_KEYS = {"kind", "center", "amplitude", "decay",
            "centers", "amplitudes", "decays", "level", "path"}
_SEED_KEYS = {"kind", "center", "amplitude", "decay", "ratio", "noncompliant_fraction"}


def _parse_floats(text: str, line: int, expect: int | None = None) -> tuple[float, ...]:
    tokens = text.replace(",", " ").split()
    try:
        values = tuple(float(tok) for tok in tokens)
    except ValueError as exc:
        raise ScenarioError(f"expected numbers, got {text!r}", line) from exc
    if expect is not None and len(values) != expect:
        raise ScenarioError(f"expected {expect} numbers, got {len(values)} in {text!r}", line)
    return values


def _parse_float(text: str, line: int) -> float:
    return _parse_floats(text, line, expect=1)[0]


def _parse_int(text: str, line: int) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ScenarioError(f"expected an integer, got {text!r}", line) from exc


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse scenario text into a fully validated ScenarioConfig."""
    pairs: dict[str, tuple[str, int]] = {}
    preset_name: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ScenarioError(f"expected 'key = value', got {stripped!r}", lineno)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not value:
            raise ScenarioError(f"empty value for key {key!r}", lineno)
        if key == "preset":
            if preset_name is not None:
                raise ScenarioError("duplicate preset key", lineno)
            preset_name = value
            if value not in _PRESET_RATES:
                raise ScenarioError(
                    f"unknown preset {value!r}; expected one of {PRESET_NAMES}", lineno
                )
            continue
        if key in pairs:
            raise ScenarioError(f"duplicate key {key!r}", lineno)
        pairs[key] = (value, lineno)

    if preset_name is not None:
        cfg = preset(preset_name)
    else:
        required = ["params.beta", "params.gamma", "params.delta", "params.alpha",
                    "params.mu", "params.nu", "params.xi", "params.birth", "ic.kind"]
        missing = [k for k in required if k not in pairs]
        if missing:
            raise ScenarioError(
                "no preset given and required keys missing: " + ", ".join(missing)
            )
        grid = GridSpec()
        cfg = ScenarioConfig(
            grid=grid,
            params=ModelParams(
                beta=0.0, gamma=0.0, delta=1.0, alpha=0.0, mu=0.0, nu=0.0, xi=1.0,
                birth=ScalarField.zeros(grid),
                d_s=0.02, d_i=0.02, d_r=0.02, d_ss=0.02, d_is=0.02, d_rs=0.02,
            ),
            stepper=StepperConfig(),
            ic=UniformIC(level=0.0),
            infected_seed=ProportionalSeed(ratio=0.01),
            label="scenario",
        )
    return _apply_overrides(cfg, pairs)


def _apply_overrides(cfg: ScenarioConfig, pairs: dict[str, tuple[str, int]]) -> ScenarioConfig:
    grid_kv: dict[str, float | int] = {}
    param_kv: dict[str, float] = {}
    stepper_kv: dict[str, object] = {}
    ic_kv: dict[str, tuple[str, int]] = {}
    seed_kv: dict[str, tuple[str, int]] = {}
    label = cfg.label
    seed_fraction = cfg.noncompliant_seed_fraction

    for key, (value, line) in pairs.items():
        if key == "label":
            label = value
            continue
        if "." not in key:
            raise ScenarioError(f"unknown key {key!r}", line)
        section, name = key.split(".", 1)
        if section == "grid" and name in _GRID_KEYS:
            grid_kv[name] = _parse_int(value, line) if name in ("nx", "ny") else _parse_float(value, line)
        elif section == "params" and name in _PARAM_KEYS:
            param_kv[name] = _parse_float(value, line)
        elif section == "stepper" and name in _STEPPER_KEYS:
            if name == "series_stride":
                stepper_kv[name] = _parse_int(value, line)
            elif name == "snapshot_times":
                stepper_kv[name] = _parse_floats(value, line)
            else:
                stepper_kv[name] = _parse_float(value, line)
        elif section == "ic" and name in _IC_KEYS:
            ic_kv[name] = (value, line)
        elif section == "seed" and name in _SEED_KEYS:
            seed_kv[name] = (value, line)
        else:
            raise ScenarioError(f"unknown key {key!r}", line)

    grid = cfg.grid
    if grid_kv:
        grid = replace(grid, **grid_kv)

    stepper = cfg.stepper
    if stepper_kv:
        if "snapshot_times" not in stepper_kv and "t_end" in stepper_kv:
            # inherited snapshot times may fall beyond a shortened horizon
            t_end = stepper_kv["t_end"]
            stepper_kv["snapshot_times"] = tuple(
                t for t in stepper.snapshot_times if t <= t_end
            )
        stepper = replace(stepper, **stepper_kv)

    ic = _build_ic(cfg.ic, ic_kv)
    infected_seed = cfg.infected_seed
    if "noncompliant_fraction" in seed_kv:
        value, line = seed_kv.pop("noncompliant_fraction")
        seed_fraction = _parse_float(value, line)
    if seed_kv:
        infected_seed = _build_seed(cfg.infected_seed, seed_kv)

    p = cfg.params
    birth_level = param_kv.pop("birth", None)
    if birth_level is None:
        # keep the existing birth field unless the grid changed shape
        if grid == cfg.grid:
            birth = p.birth
        else:
            birth = ScalarField.full(grid, float(p.birth.values.flat[0]))
    else:
        birth = ScalarField.full(grid, birth_level)
    d_all = param_kv.pop("d", None)
    diffusion = {name: param_kv.pop(name, getattr(p, name))
                 for name in ("d_s", "d_i", "d_r", "d_ss", "d_is", "d_rs")}
    if d_all is not None:
        diffusion = {name: d_all for name in diffusion}
    try:
        params = ModelParams(
            beta=param_kv.get("beta", p.beta),
            gamma=param_kv.get("gamma", p.gamma),
            delta=param_kv.get("delta", p.delta),
            alpha=param_kv.get("alpha", p.alpha),
            mu=param_kv.get("mu", p.mu),
            nu=param_kv.get("nu", p.nu),
            xi=param_kv.get("xi", p.xi),
            birth=birth,
            **diffusion,
        )
        return ScenarioConfig(
            grid=grid,
            params=params,
            stepper=stepper,
            ic=ic,
            infected_seed=infected_seed,
            noncompliant_seed_fraction=seed_fraction,
            label=label,
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def _build_ic(base: InitialCondition, kv: dict[str, tuple[str, int]]) -> InitialCondition:
    if not kv:
        return base
    kind = kv.pop("kind", (base.kind, 0))[0]
    if kind == "single_gaussian":
        default = base if isinstance(base, SingleGaussianIC) else SingleGaussianIC()
        center = default.center
        if "center" in kv:
            center = _parse_floats(*kv.pop("center"), expect=2)
        amplitude = _parse_float(*kv.pop("amplitude")) if "amplitude" in kv else default.amplitude
        decay = _parse_float(*kv.pop("decay")) if "decay" in kv else default.decay
        out: InitialCondition = SingleGaussianIC(tuple(center), amplitude, decay)
    elif kind == "four_gaussians":
        default = base if isinstance(base, FourGaussiansIC) else FourGaussiansIC()
        centers = default.centers
        if "centers" in kv:
            flat = _parse_floats(*kv.pop("centers"), expect=8)
            centers = tuple((flat[2 * i], flat[2 * i + 1]) for i in range(4))
        amplitudes = tuple(_parse_floats(*kv.pop("amplitudes"), expect=4)) if "amplitudes" in kv else default.amplitudes
        decays = tuple(_parse_floats(*kv.pop("decays"), expect=4)) if "decays" in kv else default.decays
        out = FourGaussiansIC(centers, amplitudes, decays)
    elif kind == "uniform":
        default = base if isinstance(base, UniformIC) else UniformIC()
        level = _parse_float(*kv.pop("level")) if "level" in kv else default.level
        out = UniformIC(level)
    elif kind == "file":
        if "path" not in kv:
            raise ScenarioError("ic.kind = file requires ic.path")
        out = FileIC(kv.pop("path")[0])
    else:
        raise ScenarioError(f"unknown ic.kind {kind!r}")
    if kv:
        key, (_, line) = next(iter(kv.items()))
        raise ScenarioError(f"key ic.{key} does not apply to ic.kind = {kind}", line)
    return out


def _build_seed(base: InfectedSeed, kv: dict[str, tuple[str, int]]) -> InfectedSeed:
    kind = kv.pop("kind", (base.kind, 0))[0]
    if kind == "gaussian":
        default = base if isinstance(base, GaussianSeed) else GaussianSeed()
        center = default.center
        if "center" in kv:
            center = tuple(_parse_floats(*kv.pop("center"), expect=2))
        amplitude = _parse_float(*kv.pop("amplitude")) if "amplitude" in kv else default.amplitude
        decay = _parse_float(*kv.pop("decay")) if "decay" in kv else default.decay
        out: InfectedSeed = GaussianSeed(tuple(center), amplitude, decay)
    elif kind == "proportional":
        default = base if isinstance(base, ProportionalSeed) else ProportionalSeed()
        ratio = _parse_float(*kv.pop("ratio")) if "ratio" in kv else default.ratio
        out = ProportionalSeed(ratio)
    else:
        raise ScenarioError(f"unknown seed.kind {kind!r}")
    if kv:
        key, (_, line) = next(iter(kv.items()))
        raise ScenarioError(f"key seed.{key} does not apply to seed.kind = {kind}", line)
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize_scenario(cfg: ScenarioConfig) -> str:
    """Canonical full-form text; parse_scenario(serialize_scenario(c)) == c.

    Only constant birth fields serialize (the text format has no field
    literals); scenarios built programmatically with a varying b(x) must be
    persisted by code, not config text.
    """
    b = cfg.params.birth.values
    if not np.all(b == b.flat[0]):
        raise ScenarioError("only constant birth fields can be serialized to text")
    lines = [f"label = {cfg.label}"]
    g = cfg.grid
    lines += [f"grid.{k} = {_fmt(getattr(g, k))}" for k in ("xmin", "xmax", "ymin", "ymax")]
    lines += [f"grid.nx = {g.nx}", f"grid.ny = {g.ny}"]
    p = cfg.params
    lines += [f"params.{k} = {_fmt(getattr(p, k))}"
              for k in ("beta", "gamma", "delta", "alpha", "mu", "nu", "xi")]
    lines.append(f"params.birth = {_fmt(b.flat[0])}")
    lines += [f"params.{k} = {_fmt(getattr(p, k))}"
              for k in ("d_s", "d_i", "d_r", "d_ss", "d_is", "d_rs")]
    s = cfg.stepper
    lines += [
        f"stepper.dt = {_fmt(s.dt)}",
        f"stepper.t_end = {_fmt(s.t_end)}",
        f"stepper.solver_tol = {_fmt(s.solver_tol)}",
        f"stepper.series_stride = {s.series_stride}",
    ]
    if s.snapshot_times:
        lines.append("stepper.snapshot_times = " + " ".join(_fmt(t) for t in s.snapshot_times))
    ic = cfg.ic
    lines.append(f"ic.kind = {ic.kind}")
    if isinstance(ic, SingleGaussianIC):
        lines.append(f"ic.center = {_fmt(ic.center[0])} {_fmt(ic.center[1])}")
        lines.append(f"ic.amplitude = {_fmt(ic.amplitude)}")
        lines.append(f"ic.decay = {_fmt(ic.decay)}")
    elif isinstance(ic, FourGaussiansIC):
        flat = " ".join(f"{_fmt(c[0])} {_fmt(c[1])}" for c in ic.centers)
        lines.append(f"ic.centers = {flat}")
        lines.append("ic.amplitudes = " + " ".join(_fmt(a) for a in ic.amplitudes))
        lines.append("ic.decays = " + " ".join(_fmt(k) for k in ic.decays))
    elif isinstance(ic, UniformIC):
        lines.append(f"ic.level = {_fmt(ic.level)}")
    elif isinstance(ic, FileIC):
        lines.append(f"ic.path = {ic.path}")
    seed = cfg.infected_seed
    lines.append(f"seed.kind = {seed.kind}")
    if isinstance(seed, GaussianSeed):
        lines.append(f"seed.center = {_fmt(seed.center[0])} {_fmt(seed.center[1])}")
        lines.append(f"seed.amplitude = {_fmt(seed.amplitude)}")
        lines.append(f"seed.decay = {_fmt(seed.decay)}")
    else:
        lines.append(f"seed.ratio = {_fmt(seed.ratio)}")
    lines.append(f"seed.noncompliant_fraction = {_fmt(cfg.noncompliant_seed_fraction)}")
    return "\n".join(lines) + "\n"


def load_scenario(path: str | Path) -> ScenarioConfig:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def with_resolution(cfg: ScenarioConfig, nx: int, ny: int) -> ScenarioConfig:
    """Same scenario on an nx x ny grid (recipes re-evaluate analytically).

    Requires a constant birth field and an analytic initial condition;
    file-based fields are tied to their original grid.
    """
    if isinstance(cfg.ic, FileIC):
        raise ScenarioError("cannot change the grid of a file-based initial condition")
    b = cfg.params.birth.values
    if not np.all(b == b.flat[0]):
        raise ScenarioError("cannot change the grid under a non-constant birth field")
    grid = replace(cfg.grid, nx=nx, ny=ny)
    params = replace(cfg.params, birth=ScalarField.full(grid, float(b.flat[0])))
    return replace(cfg, grid=grid, params=params)
