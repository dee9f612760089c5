"""Disease-free steady states, principal eigenvalues, reproduction numbers.

Two disease-free regimes admit a closed steady susceptible profile and are
analyzed here:

* ``noncompliant``: everyone is born noncompliant (xi = 0). The steady
  profile solves (nu + delta) S* - d Lap S* = b, the linearized infection
  operator is d_I* Lap + (beta S* - (gamma + nu + delta)), and the
  reproduction number weighs infectivity beta S* against absorption
  gamma + nu + delta.
* ``compliant``: everyone is born compliant (xi = 1). The steady profile
  solves delta S - d Lap S = b, the potential is
  beta (1 - alpha)^2 S - (gamma + delta), and the infectivity carries the
  (1 - alpha)^2 attenuation.

The reproduction number is the largest generalized eigenvalue of
A phi = R B phi with A = diag(infectivity) and B = absorption - d Lap
(symmetric positive definite), computed by power iteration on B^{-1} A
using the exact spectral Helmholtz solve. The principal eigenvalue of
d Lap + c(x) is computed by shifted inverse power iteration: with the
shift above the whole spectrum the shifted operator is positive definite
and its inverse makes the principal mode dominant; the shift is tightened
toward the Rayleigh quotient once the residual is small. R - 1 and the
principal eigenvalue always share a sign, which ``sign_consistency``
verifies numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft

from .errors import ConvergenceError, SolverError
from .grid import GridSpec, ScalarField, laplacian_array
from .model import ModelParams
from .stepper import _neumann_symbol, helmholtz_solve

CASES = ("compliant", "noncompliant")

EIG_CHANGE_TOL = 1e-12    # relative eigenvalue-change stopping criterion
RESIDUAL_TOL = 1e-8       # operator residual, relative to max(1, |lambda|)
KNIFE_EDGE_TOL = 1e-6     # |R - 1| below this exempts the sign comparison
_MAX_OUTER = 20_000


@dataclass
class EigenResult:
    """Principal eigenpair of d Lap + c(x) under the zero-flux closure.

    ``phi`` is strictly positive and normalized to integral(phi^2) = 1.
    """

    lam: float
    phi: ScalarField
    iterations: int
    residual: float


@dataclass
class R0Result:
    """Reproduction number with its maximizing profile."""

    value: float
    phi: ScalarField
    which: str
    iterations: int = 0
    residual: float = 0.0


@dataclass
class LinearizationReport:
    """Cellwise cooperativity/stability check of the linearization blocks.

    ``passed`` requires both blocks cooperative and both spectra strictly
    in the left half plane at every cell.
    """

    which: str
    cooperative_neg_v: bool
    cooperative_m: bool
    max_real_eig_neg_v: float
    max_real_eig_m: float

    @property
    def passed(self) -> bool:
        return (
            self.cooperative_neg_v
            and self.cooperative_m
            and self.max_real_eig_neg_v < 0.0
            and self.max_real_eig_m < 0.0
        )


@dataclass
class SignConsistencyReport:
    """Comparison of sign(R - 1) against sign(lambda) for one regime."""

    which: str
    lam: float
    r0: float

    @property
    def knife_edge(self) -> bool:
        return abs(self.r0 - 1.0) <= KNIFE_EDGE_TOL

    @property
    def consistent(self) -> bool:
        if self.knife_edge:
            return True
        return (self.r0 - 1.0 > 0.0) == (self.lam > 0.0)


def _require_case(which: str) -> str:
    if which not in CASES:
        raise ValueError(f"which must be one of {CASES}, got {which!r}")
    return which


# ---------------------------------------------------------------------------
# Steady states and per-case coefficients
# ---------------------------------------------------------------------------

def steady_state(b: ScalarField, rate: float, d: float) -> ScalarField:
    """Positive steady profile solving rate * u - d * Lap u = b.

    For constant b this is exactly b / rate; for varying b the solve meets
    the linear-solver residual contract.
    """
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    if b.values.min() < 0 or not b.values.any():
        raise ValueError("b must be nonnegative and not identically zero")
    u = helmholtz_solve(b, a=rate, d=d)
    if u.values.min() <= 0:
        raise SolverError("steady state came out nonpositive; inputs are inconsistent")
    return u


def dfe_steady_state(p: ModelParams, which: str) -> ScalarField:
    """Steady susceptible profile of the requested disease-free regime."""
    if _require_case(which) == "noncompliant":
        return steady_state(p.birth, rate=p.nu + p.delta, d=p.d_ss)
    return steady_state(p.birth, rate=p.delta, d=p.d_s)


def dfe_potential(p: ModelParams, steady: ScalarField, which: str) -> ScalarField:
    """Zeroth-order coefficient of the linearized infection equation."""
    if _require_case(which) == "noncompliant":
        c = p.beta * steady.values - (p.gamma + p.nu + p.delta)
    else:
        c = p.beta * (1.0 - p.alpha) ** 2 * steady.values - (p.gamma + p.delta)
    return ScalarField(steady.grid, c)


def dfe_infectivity(p: ModelParams, steady: ScalarField, which: str) -> ScalarField:
    if _require_case(which) == "noncompliant":
        return ScalarField(steady.grid, p.beta * steady.values)
    return ScalarField(steady.grid, p.beta * (1.0 - p.alpha) ** 2 * steady.values)


def dfe_absorption(p: ModelParams, which: str) -> float:
    if _require_case(which) == "noncompliant":
        return p.gamma + p.nu + p.delta
    return p.gamma + p.delta


def infected_diffusion(p: ModelParams, which: str) -> float:
    return p.d_is if _require_case(which) == "noncompliant" else p.d_i


def classify_dfe(p: ModelParams) -> str:
    """Pick the disease-free regime a scenario's dynamics settle toward.

    Requires xi in {0, 1}. Births route to S* when xi = 0, so only the
    noncompliant regime exists there. With xi = 1 the compliant profile
    S = b/delta exists, but it is invaded by noncompliance whenever
    mu * max(S) exceeds nu + delta (the growth rate of a small noncompliant
    perturbation), in which case the population still ends up noncompliant
    and the noncompliant regime is the relevant one.
    """
    if p.xi == 0.0:
        return "noncompliant"
    if p.xi == 1.0:
        steady = dfe_steady_state(p, "compliant")
        if p.mu * steady.max() <= p.nu + p.delta:
            return "compliant"
        return "noncompliant"
    raise ValueError(
        f"xi = {p.xi} is strictly between 0 and 1: neither disease-free "
        "steady profile exists in closed form; set xi to 0 or 1"
    )


# ---------------------------------------------------------------------------
# Principal eigenpair of d Lap + c(x)
# ---------------------------------------------------------------------------

class _NegativeCurvature(Exception):
    """CG detected an indefinite operator (shift landed inside the spectrum)."""


def _pcg(op, precond, b: np.ndarray, tol: float, maxiter: int = 500) -> np.ndarray:
    """Preconditioned conjugate gradients on 2-D arrays."""
    x = np.zeros_like(b)
    r = b.copy()
    z = precond(r)
    p = z.copy()
    rz = float((r * z).sum())
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return x
    for _ in range(maxiter):
        ap = op(p)
        pap = float((p * ap).sum())
        if pap <= 0.0:
            raise _NegativeCurvature
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        if np.linalg.norm(r) <= tol * b_norm:
            return x
        z = precond(r)
        rz_next = float((r * z).sum())
        p = z + (rz_next / rz) * p
        rz = rz_next
    raise ConvergenceError(f"inner CG stalled after {maxiter} iterations")


def principal_eigenpair(
    d: float,
    c: ScalarField,
    v0: ScalarField | None = None,
    maxiter: int = _MAX_OUTER,
) -> EigenResult:
    """Largest eigenvalue of d Lap + diag(c) with its positive eigenfunction.

    Shifted inverse power iteration: sigma = max|c| + 1 exceeds the whole
    spectrum (the Rayleigh quotient is at most max c), so sigma - A is
    positive definite and (sigma - A)^{-1} has the principal mode dominant.
    The shift is tightened toward the Rayleigh quotient as the residual
    shrinks, falling back to the safe shift if the inner CG reports
    indefiniteness. An arbitrary positive scaling of ``v0`` does not change
    the result.
    """
    if d <= 0:
        raise ValueError(f"diffusion d must be positive, got {d}")
    grid = c.grid
    cv = c.values
    sigma_safe = float(np.abs(cv).max()) + 1.0
    c_mean = float(cv.mean())
    sym = d * _neumann_symbol(grid)

    def apply_a(u: np.ndarray) -> np.ndarray:
        return d * laplacian_array(u, grid.hx, grid.hy) + cv * u

    v = np.ones(grid.shape) if v0 is None else v0.values.astype(float).copy()
    v /= np.linalg.norm(v)

    lam_prev = np.inf
    lam = 0.0
    residual = np.inf
    for iteration in range(1, maxiter + 1):
        av = apply_a(v)
        lam = float((v * av).sum())
        residual = float(np.linalg.norm(av - lam * v))
        if (
            abs(lam - lam_prev) <= EIG_CHANGE_TOL * max(1.0, abs(lam))
            and residual <= RESIDUAL_TOL * max(1.0, abs(lam))
        ):
            break
        lam_prev = lam

        sigma = min(sigma_safe, lam + max(2.0 * residual, 1e-10 * max(1.0, abs(lam))))
        # the preconditioner only approximates (sigma - A); keep it SPD even
        # when the tightened shift dips below mean(c)
        precond_gap = max(sigma - c_mean, 1e-3)

        def op(u, _sigma=sigma):
            return _sigma * u - apply_a(u)

        def precond(r, _gap=precond_gap):
            return fft.idctn(fft.dctn(r, type=2) / (_gap + sym), type=2)

        try:
            w = _pcg(op, precond, v, tol=1e-13)
        except _NegativeCurvature:
            # tightened shift fell inside the spectrum; redo safely
            safe_gap = sigma_safe - c_mean
            w = _pcg(
                lambda u: sigma_safe * u - apply_a(u),
                lambda r: fft.idctn(fft.dctn(r, type=2) / (safe_gap + sym), type=2),
                v,
                tol=1e-13,
            )
        if w.sum() < 0:
            w = -w
        v = w / np.linalg.norm(w)
    else:
        raise ConvergenceError(
            f"principal eigenpair did not converge in {maxiter} iterations "
            f"(residual {residual:.3e})"
        )

    if v.min() <= 0.0:
        v = _perron_polish(grid, v, cv, d)
        av = apply_a(v)
        lam = float((v * av).sum())
        residual = float(np.linalg.norm(av - lam * v))
        if residual > RESIDUAL_TOL * max(1.0, abs(lam)):
            raise SolverError(
                f"positivity polish degraded the residual to {residual:.3e}"
            )
    phi = _normalize_positive(grid, v)
    return EigenResult(lam=lam, phi=phi, iterations=iteration, residual=residual)


def _normalize_positive(grid: GridSpec, v: np.ndarray) -> ScalarField:
    """Scale to integral(phi^2) = 1 and orient positive."""
    if v.sum() < 0:
        v = -v
    phi = v / np.sqrt((v**2).sum() * grid.cell_area)
    if phi.min() <= 0:
        raise SolverError("principal eigenfunction is not strictly positive")
    return ScalarField(grid, phi)


def _perron_polish(grid: GridSpec, v: np.ndarray, cv: np.ndarray, d: float) -> np.ndarray:
    """Restore strict positivity of a near-eigenvector of d Lap + c.

    Where the true eigenfunction decays below roundoff, computed entries
    carry noise signs. Applying A + sigma with sigma chosen so that every
    stencil coefficient is nonnegative is free of cancellation; with the
    smallest admissible sigma the neighbor coupling dominates, positivity
    spreads one ring of cells per application, and each application is a
    power-iteration step for the principal mode, so the eigenvector only
    sharpens. In exact arithmetic every entry is positive after enough
    applications (the stencil graph is connected).
    """
    hx2, hy2 = grid.hx**2, grid.hy**2
    shift = 2.0 * d / hx2 + 2.0 * d / hy2 - float(cv.min())
    center = shift + cv - 2.0 * d / hx2 - 2.0 * d / hy2   # >= 0, zero at min(c)
    for _ in range(grid.nx + grid.ny + 10):
        p = np.pad(v, 1, mode="edge")
        v = (
            center * v
            + (d / hx2) * (p[:-2, 1:-1] + p[2:, 1:-1])
            + (d / hy2) * (p[1:-1, :-2] + p[1:-1, 2:])
        )
        v /= np.linalg.norm(v)
        if v.min() > 0.0:
            break
    return v


# ---------------------------------------------------------------------------
# Reproduction number
# ---------------------------------------------------------------------------

def reproduction_number(
    d: float,
    infectivity: ScalarField,
    absorption: float,
    which: str = "noncompliant",
    maxiter: int = _MAX_OUTER,
) -> R0Result:
    """sup over phi of int(infectivity phi^2) / int(d |grad phi|^2 + absorption phi^2).

    The supremum is the largest generalized eigenvalue of A phi = R B phi
    with A = diag(infectivity) and B = absorption - d Lap (symmetric
    positive definite). It is found by Krylov iteration on the symmetrized
    operator A^{1/2} B^{-1} A^{1/2}, whose action costs one exact cosine-
    basis Helmholtz solve; plain power iteration on B^{-1} A stalls when
    the top of the spectrum clusters, Lanczos does not. The maximizer
    phi = B^{-1} A^{1/2} w is strictly positive even where the infectivity
    vanishes because B has a positive inverse kernel.
    """
    from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

    _require_case(which)
    if absorption <= 0:
        raise ValueError(f"absorption must be positive, got {absorption}")
    if d <= 0:
        raise ValueError(f"diffusion d must be positive, got {d}")
    inf_values = infectivity.values
    if inf_values.min() < 0 or not inf_values.any():
        raise ValueError("infectivity must be nonnegative and not identically zero")
    grid = infectivity.grid
    n = grid.nx * grid.ny
    sqrt_inf = np.sqrt(inf_values)
    symbol = absorption + d * _neumann_symbol(grid)
    matvecs = 0

    def solve_b(z: np.ndarray) -> np.ndarray:
        return fft.idctn(fft.dctn(z, type=2) / symbol, type=2)

    def matvec(w: np.ndarray) -> np.ndarray:
        nonlocal matvecs
        matvecs += 1
        z = sqrt_inf * w.reshape(grid.shape)
        return (sqrt_inf * solve_b(z)).ravel()

    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    try:
        vals, vecs = eigsh(op, k=1, which="LA", v0=np.ones(n), tol=0, maxiter=100 * n)
    except ArpackNoConvergence as exc:
        raise ConvergenceError(f"reproduction number iteration failed: {exc}") from exc
    value = float(vals[0])
    w = vecs[:, 0].reshape(grid.shape)
    if value <= 0:
        raise SolverError(f"reproduction number came out nonpositive ({value:.3e})")

    # The Lanczos vector can mix modes when the top of the spectrum
    # clusters; recover the maximizer by power steps v <- B^{-1}(A v) from a
    # positive start. B^{-1} has a strictly positive kernel, so iterates are
    # positive in exact arithmetic; cells whose true value sits below
    # roundoff can still flip sign numerically, so keep the best-residual
    # iterate among the strictly positive ones.
    v = solve_b(sqrt_inf * np.abs(w) + inf_values)
    best = None
    best_residual = np.inf
    for _ in range(200):
        v = v / np.linalg.norm(v)
        av = inf_values * v
        bv = absorption * v - d * laplacian_array(v, grid.hx, grid.hy)
        residual = float(np.linalg.norm(av - value * bv))
        if residual < best_residual and v.min() > 0.0:
            best, best_residual = v, residual
        if best_residual <= RESIDUAL_TOL * max(1.0, value):
            break
        v = solve_b(av)
        matvecs += 1
    if best is None:
        raise SolverError(
            "could not certify a strictly positive maximizer; the "
            "eigenfunction is localized below floating-point resolution"
        )

    phi = _normalize_positive(grid, best)
    return R0Result(
        value=value, phi=phi, which=which, iterations=matvecs, residual=best_residual
    )


def dfe_reproduction_number(p: ModelParams, which: str) -> R0Result:
    """Reproduction number of the requested disease-free regime."""
    steady = dfe_steady_state(p, which)
    return reproduction_number(
        d=infected_diffusion(p, which),
        infectivity=dfe_infectivity(p, steady, which),
        absorption=dfe_absorption(p, which),
        which=which,
    )


# ---------------------------------------------------------------------------
# Linearization matrices and sign consistency
# ---------------------------------------------------------------------------

def _linearization_blocks(steady: np.ndarray, p: ModelParams, which: str):
    """Cellwise 2x2 V and 4x4 M blocks of the linearization at the DFE.

    Rows/columns of M follow the non-infected ordering (S, S*, R, R*); V acts
    on the infected pair (I, I*). Entries are the partial derivatives of the
    transfer terms evaluated at the steady state, so the two regimes differ:
    at the noncompliant profile the mu-transfer terms are felt through
    mu * S*(x), at the compliant profile through mu * S(x) acting on the
    noncompliant perturbations.
    """
    s = steady.ravel()
    n = s.size
    g, dlt, nu = p.gamma, p.delta, p.nu
    mus = p.mu * s
    V = np.zeros((n, 2, 2))
    M = np.zeros((n, 4, 4))
    if which == "noncompliant":
        V[:, 0, 0] = g + dlt + mus
        V[:, 0, 1] = -nu
        V[:, 1, 0] = -mus
        V[:, 1, 1] = g + dlt + nu
        M[:, 0, 0] = -mus - dlt
        M[:, 0, 1] = nu
        M[:, 1, 0] = mus
        M[:, 1, 1] = -nu - dlt
        M[:, 2, 2] = -mus - dlt
        M[:, 2, 3] = nu
        M[:, 3, 2] = mus
        M[:, 3, 3] = -nu - dlt
    else:
        V[:, 0, 0] = g + dlt
        V[:, 0, 1] = -nu
        V[:, 1, 1] = g + dlt + nu
        M[:, 0, 0] = -dlt
        M[:, 0, 1] = nu - mus
        M[:, 0, 3] = -mus
        M[:, 1, 1] = mus - (nu + dlt)
        M[:, 1, 3] = mus
        M[:, 2, 2] = -dlt
        M[:, 2, 3] = nu
        M[:, 3, 3] = -(nu + dlt)
    return V, M


def _cooperative(blocks: np.ndarray) -> bool:
    """All off-diagonal entries nonnegative, at every cell."""
    k = blocks.shape[-1]
    off = ~np.eye(k, dtype=bool)
    return bool(np.all(blocks[:, off] >= 0.0))


def dfe_linearization_check(
    steady: ScalarField, p: ModelParams, which: str
) -> LinearizationReport:
    """Check cooperativity and spectral stability of -V and M cell by cell.

    Report-only: the result states whether the stability framework's
    hypotheses hold for this regime at these parameters.
    """
    _require_case(which)
    if steady.values.min() <= 0:
        raise ValueError("steady profile must be strictly positive")
    V, M = _linearization_blocks(steady.values, p, which)
    neg_v = -V
    eig_neg_v = np.linalg.eigvals(neg_v)
    eig_m = np.linalg.eigvals(M)
    return LinearizationReport(
        which=which,
        cooperative_neg_v=_cooperative(neg_v),
        cooperative_m=_cooperative(M),
        max_real_eig_neg_v=float(eig_neg_v.real.max()),
        max_real_eig_m=float(eig_m.real.max()),
    )


def sign_consistency(p: ModelParams, which: str) -> SignConsistencyReport:
    """Verify that R - 1 and the principal eigenvalue share a sign.

    The comparison is skipped (reported consistent) within the knife-edge
    band |R - 1| <= 1e-6 where roundoff decides both signs.
    """
    _require_case(which)
    steady = dfe_steady_state(p, which)
    eig = principal_eigenpair(infected_diffusion(p, which), dfe_potential(p, steady, which))
    r0 = dfe_reproduction_number(p, which)
    return SignConsistencyReport(which=which, lam=eig.lam, r0=r0.value)
