"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes, so new failure modes should
subclass one of the four top branches rather than raising bare exceptions.
"""

from __future__ import annotations


class RdsirError(Exception):
    """Base class for all package-specific failures."""


class GridMismatchError(RdsirError):
    """Fields from different grids were combined."""


class ScenarioError(RdsirError):
    """Invalid scenario text or configuration values."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SolverError(RdsirError):
    """A linear solve or eigenvalue iteration failed to meet its contract."""


class SingularOperatorError(SolverError):
    """The requested operator is singular (pure Neumann Laplacian, a = 0)."""


class ConvergenceError(SolverError):
    """Iteration budget exhausted before reaching the requested tolerance."""


class InvariantViolationError(RdsirError):
    """A runtime invariant of the scheme was violated."""


class NegativityError(InvariantViolationError):
    """A compartment dipped below the numerical nonnegativity tolerance."""

    def __init__(self, message: str, time: float):
        self.time = time
        super().__init__(f"{message} (t = {time:g})")


class MassBoundError(InvariantViolationError):
    """The total-population bound was violated beyond tolerance."""
