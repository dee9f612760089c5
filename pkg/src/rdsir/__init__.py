"""Reaction-diffusion SIR model with noncompliance as a parallel contagion.

Six density fields (compliant and noncompliant S/I/R) evolve on a uniform
cell-centered grid with zero-flux boundaries. The package provides the
semi-implicit time stepper, disease-free steady-state and reproduction-number
analysis, scenario presets with a plain-text config format, and a CLI that
persists runs as CSV for external tooling.
"""

from .diagnostics import (
    SeriesRecord,
    field_argmax,
    infected_fraction,
    local_maxima,
    local_minima,
    mass_bound_gap,
    noncompliant_fraction,
)
from .errors import (
    ConvergenceError,
    GridMismatchError,
    InvariantViolationError,
    MassBoundError,
    NegativityError,
    RdsirError,
    ScenarioError,
    SingularOperatorError,
    SolverError,
)
from .grid import GridSpec, ScalarField, apply_laplacian, integrate, norm
from .model import (
    COMPARTMENTS,
    EpidemicState,
    ModelParams,
    ReactionTerms,
    noncompliant_field,
    reaction_rhs,
    total_population,
)
from .scenario import (
    PRESET_NAMES,
    FourGaussiansIC,
    GaussianSeed,
    ProportionalSeed,
    ScenarioConfig,
    SingleGaussianIC,
    UniformIC,
    build_initial_state,
    gaussian_field,
    load_scenario,
    parse_scenario,
    preset,
    serialize_scenario,
)
from .spectral import (
    EigenResult,
    LinearizationReport,
    R0Result,
    SignConsistencyReport,
    classify_dfe,
    dfe_linearization_check,
    dfe_reproduction_number,
    dfe_steady_state,
    principal_eigenpair,
    reproduction_number,
    sign_consistency,
    steady_state,
)
from .stepper import (
    StepperConfig,
    Trajectory,
    helmholtz_solve,
    imex_step,
    run_scenario,
)

__version__ = "0.1.0"
