"""Reproduction numbers, principal eigenvalues, and their shared sign.

For the bundled constant-coefficient regimes everything has a closed form:
the noncompliant steady profile is b/(nu+delta) and
R0* = beta (b/(nu+delta)) / (gamma+nu+delta). The script compares the
computed values against those forms, then sweeps beta through the
critical value to show R - 1 and the principal eigenvalue changing sign
together (they always share a sign).

Pure terminal output; no plotting dependencies.
"""

from dataclasses import replace

import numpy as np

from rdsir import preset
from rdsir.spectral import (
    dfe_reproduction_number,
    dfe_steady_state,
    dfe_potential,
    infected_diffusion,
    principal_eigenpair,
)


def closed_form(p):
    steady = 0.02 / (p.nu + p.delta)
    return p.beta * steady / (p.gamma + p.nu + p.delta)


def main():
    print("bundled regimes (noncompliant disease-free analysis)")
    print(f"{'regime':>8} {'R0* computed':>14} {'R0* closed form':>16} {'lambda':>12}")
    for name in ("fig3", "fig4"):
        p = preset(name, nx=64, ny=64).params
        r = dfe_reproduction_number(p, "noncompliant")
        steady = dfe_steady_state(p, "noncompliant")
        eig = principal_eigenpair(
            infected_diffusion(p, "noncompliant"),
            dfe_potential(p, steady, "noncompliant"),
        )
        print(f"{name:>8} {r.value:14.6f} {closed_form(p):16.6f} {eig.lam:12.6f}")

    print()
    print("beta sweep through the critical value (fig3 regime otherwise)")
    base = preset("fig3", nx=32, ny=32).params
    beta_critical = (base.gamma + base.nu + base.delta) / (0.02 / (base.nu + base.delta))
    print(f"critical beta = {beta_critical:.4f}")
    print(f"{'beta':>10} {'R0*':>10} {'lambda':>12} {'same sign':>10}")
    for factor in (0.25, 0.5, 0.9, 0.99, 1.01, 1.5, 4.0):
        p = replace(base, beta=factor * beta_critical)
        r = dfe_reproduction_number(p, "noncompliant")
        steady = dfe_steady_state(p, "noncompliant")
        eig = principal_eigenpair(
            infected_diffusion(p, "noncompliant"),
            dfe_potential(p, steady, "noncompliant"),
        )
        agree = (r.value > 1.0) == (eig.lam > 0.0)
        print(f"{p.beta:10.4f} {r.value:10.5f} {eig.lam:12.6f} {str(agree):>10}")


if __name__ == "__main__":
    main()
