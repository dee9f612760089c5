import numpy as np
import pytest

from rdsir.grid import GridSpec, ScalarField


@pytest.fixture
def small_grid():
    return GridSpec(nx=16, ny=16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_field(grid: GridSpec, rng, lo=0.0, hi=1.0) -> ScalarField:
    return ScalarField(grid, rng.uniform(lo, hi, size=grid.shape))


def smooth_field(grid: GridSpec, rng, amplitude=1.0, modes=3) -> ScalarField:
    """Random low-frequency cosine combination (resolvable on coarse grids)."""
    X, Y = grid.meshgrid()
    lx = grid.xmax - grid.xmin
    ly = grid.ymax - grid.ymin
    values = np.zeros(grid.shape)
    for _ in range(modes):
        kx, ky = rng.integers(0, 4, size=2)
        coeff = rng.uniform(-amplitude, amplitude)
        values += coeff * np.cos(kx * np.pi * (X - grid.xmin) / lx) * np.cos(
            ky * np.pi * (Y - grid.ymin) / ly
        )
    return ScalarField(grid, values)


def materialize_operator(apply_op, grid: GridSpec) -> np.ndarray:
    """Dense matrix of a linear field operator, built column by column.

    Brute-force oracle helper: independent of any sparse assembly inside
    the package.
    """
    n = grid.nx * grid.ny
    dense = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        dense[:, j] = apply_op(ScalarField(grid, e.reshape(grid.shape))).values.ravel()
    return dense
