"""Compartment model: parameters, state, and reaction (non-diffusive) terms.

Six densities evolve on one grid: compliant S, I, R and noncompliant
S*, I*, R* (attributes ``Ss``, ``Is``, ``Rs``). Infection spreads by mass
action with the compliant side attenuated by (1 - alpha); noncompliance
itself spreads by mass action against the total noncompliant density
N* = S* + I* + R* at rate mu and relaxes back at rate nu. Births enter S
with fraction xi and S* with fraction (1 - xi); all compartments die at
rate delta.

The reaction terms satisfy two exact identities used throughout the tests:
their pointwise sum is b(x) - delta * (total density), and with
beta = gamma = delta = 0 and b = 0 each compliant/noncompliant pair is
conserved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .grid import GridSpec, ScalarField, check_same_grid

#: Canonical compartment order used for stacked arrays and output files.
COMPARTMENTS = ("S", "I", "R", "Ss", "Is", "Rs")


@dataclass
class ModelParams:
    """Scalar rates of the reaction terms plus per-compartment diffusion.

    ``birth`` is the birth-rate density b(x); all bundled scenarios use a
    constant field but any nonnegative field is accepted. ``delta`` must be
    strictly positive: the disease-free steady states and the total-mass
    bound are b/delta-shaped and degenerate at delta = 0.
    """

    beta: float
    gamma: float
    delta: float
    alpha: float
    mu: float
    nu: float
    xi: float
    birth: ScalarField
    d_s: float
    d_i: float
    d_r: float
    d_ss: float
    d_is: float
    d_rs: float

    def __post_init__(self):
        for name in ("beta", "gamma", "mu", "nu"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        for name in ("alpha", "xi"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        for name in ("d_s", "d_i", "d_r", "d_ss", "d_is", "d_rs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.birth.values.min() < 0:
            raise ValueError("birth rate b(x) must be nonnegative")

    @property
    def grid(self) -> GridSpec:
        return self.birth.grid

    def diffusion(self) -> tuple[float, ...]:
        """Diffusion coefficients in compartment order."""
        return (self.d_s, self.d_i, self.d_r, self.d_ss, self.d_is, self.d_rs)


class ReactionTerms(NamedTuple):
    """Pointwise reaction tendencies, one field per compartment."""

    S: ScalarField
    I: ScalarField
    R: ScalarField
    Ss: ScalarField
    Is: ScalarField
    Rs: ScalarField


@dataclass
class EpidemicState:
    """The six compartment fields at one instant."""

    S: ScalarField
    I: ScalarField
    R: ScalarField
    Ss: ScalarField
    Is: ScalarField
    Rs: ScalarField
    time: float = 0.0

    def __post_init__(self):
        check_same_grid(*self.fields())

    @property
    def grid(self) -> GridSpec:
        return self.S.grid

    def fields(self) -> tuple[ScalarField, ...]:
        return (self.S, self.I, self.R, self.Ss, self.Is, self.Rs)

    def __iter__(self) -> Iterator[ScalarField]:
        return iter(self.fields())

    def stack(self) -> np.ndarray:
        """Copy the six fields into a (6, nx, ny) array in compartment order."""
        return np.stack([f.values for f in self.fields()])

    @classmethod
    def from_stack(cls, grid: GridSpec, stack: np.ndarray, time: float) -> "EpidemicState":
        return cls(*(ScalarField(grid, stack[k].copy()) for k in range(6)), time=time)

    @classmethod
    def zeros(cls, grid: GridSpec, time: float = 0.0) -> "EpidemicState":
        return cls(*(ScalarField.zeros(grid) for _ in range(6)), time=time)

    def min_value(self) -> float:
        """Most negative cell across all compartments."""
        return min(f.min() for f in self.fields())

    def max_value(self) -> float:
        return max(f.max() for f in self.fields())


def reaction_stack(stack: np.ndarray, p: ModelParams) -> np.ndarray:
    """Reaction tendencies on a stacked (6, nx, ny) state array.

    This is the single source of the model's right-hand side; the public
    wrapper and the time stepper both call it.
    """
    S, I, R, Ss, Is, Rs = stack
    b = p.birth.values
    one_m_a = 1.0 - p.alpha
    pressure = one_m_a * I + Is          # force of infection seen by S and S*
    mu_nstar = p.mu * (Ss + Is + Rs)     # noncompliance conversion rate field

    inf_compliant = (p.beta * one_m_a) * (S * pressure)
    inf_noncomp = p.beta * (Ss * pressure)
    conv_s = S * mu_nstar
    conv_i = I * mu_nstar
    conv_r = R * mu_nstar

    out = np.empty_like(stack)
    out[0] = p.xi * b - inf_compliant - conv_s + p.nu * Ss - p.delta * S
    out[1] = inf_compliant - (p.gamma + p.delta) * I - conv_i + p.nu * Is
    out[2] = p.gamma * I - conv_r + p.nu * Rs - p.delta * R
    out[3] = (1.0 - p.xi) * b - inf_noncomp + conv_s - (p.nu + p.delta) * Ss
    out[4] = inf_noncomp - (p.gamma + p.nu + p.delta) * Is + conv_i
    out[5] = p.gamma * Is + conv_r - (p.nu + p.delta) * Rs
    return out


def reaction_rhs(u: EpidemicState, p: ModelParams) -> ReactionTerms:
    """Evaluate the non-diffusive tendencies of the model at state ``u``."""
    grid = check_same_grid(*u.fields(), p.birth)
    out = reaction_stack(u.stack(), p)
    return ReactionTerms(*(ScalarField(grid, out[k]) for k in range(6)))


def noncompliant_field(u: EpidemicState) -> ScalarField:
    """Total noncompliant density N* = S* + I* + R*."""
    return ScalarField(u.grid, u.Ss.values + u.Is.values + u.Rs.values)


def total_population(u: EpidemicState) -> float:
    """Integral over the domain of the sum of all six compartments."""
    total = sum(f.values for f in u.fields())
    return float(total.sum() * u.grid.cell_area)
