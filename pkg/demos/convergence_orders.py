"""Scheme verification: observed self-convergence orders.

The stepper treats diffusion implicitly and the reactions explicitly, so
it is first order in time; the 5-point stencil makes it second order in
space. This script measures both orders by self-convergence (no exact
solution needed) and prints the ladders. Terminal output only.
"""

from rdsir import preset
from rdsir.scenario import GaussianSeed, SingleGaussianIC
from rdsir.verification import spatial_self_convergence, temporal_self_convergence


def main():
    print("temporal ladder: dt, dt/2, dt/4 with a dt/8 reference")
    cfg = preset("fig1", nx=64, ny=64)
    rep = temporal_self_convergence(cfg, dt=0.08, t_end=2.0)
    print(f"  successive errors: {rep.step_errors[0]:.3e}, {rep.step_errors[1]:.3e}")
    print(f"  observed order:    {rep.order:.3f}   (expected ~1)")
    print(f"  reference factor:  {rep.reference_factor:.3f} (expected ~7/3)")

    print()
    print("spatial ladder: n, 2n, 4n with an 8n reference (wide smooth data)")
    cfg = preset("fig1", nx=16, ny=16)
    cfg.ic = SingleGaussianIC(center=(0.0, 0.0), amplitude=1.0, decay=1.0)
    cfg.infected_seed = GaussianSeed(center=(1.0, 1.0), amplitude=0.05, decay=1.0)
    rep = spatial_self_convergence(cfg, nx=32, dt=0.002, t_end=1.0)
    print(f"  successive errors: {rep.step_errors[0]:.3e}, {rep.step_errors[1]:.3e}")
    print(f"  observed order:    {rep.order:.3f}   (expected ~2)")
    print(f"  reference factor:  {rep.reference_factor:.3f} (expected ~63/15)")


if __name__ == "__main__":
    main()
