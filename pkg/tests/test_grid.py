import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdsir.errors import GridMismatchError
from rdsir.grid import (
    GridSpec,
    ScalarField,
    apply_laplacian,
    integrate,
    neumann_mode_eigenvalue,
    norm,
)

from conftest import random_field


class TestGridSpec:
    def test_spacings(self):
        g = GridSpec(-5, 5, -5, 5, 100, 50)
        assert g.hx == pytest.approx(0.1, abs=1e-15)
        assert g.hy == pytest.approx(0.2, abs=1e-15)
        assert g.cell_area == pytest.approx(0.02, rel=1e-14)

    def test_cell_centers_inside_domain(self):
        g = GridSpec(nx=8, ny=8)
        x = g.x_centers()
        assert x[0] == pytest.approx(-5 + 0.5 * g.hx)
        assert x[-1] == pytest.approx(5 - 0.5 * g.hx)

    @pytest.mark.parametrize("kwargs", [
        dict(nx=1), dict(ny=0), dict(xmin=2.0, xmax=2.0), dict(ymin=3.0, ymax=1.0),
    ])
    def test_rejects_bad_spec(self, kwargs):
        with pytest.raises(ValueError):
            GridSpec(**{**dict(nx=4, ny=4), **kwargs})

    def test_field_rejects_nan(self, small_grid):
        values = np.zeros(small_grid.shape)
        values[3, 3] = np.nan
        with pytest.raises(ValueError):
            ScalarField(small_grid, values)


class TestLaplacian:
    def test_constant_field_maps_to_zero(self, small_grid):
        out = apply_laplacian(ScalarField.full(small_grid, 3.0), d=0.7)
        assert np.all(out.values == 0.0)

    def test_interior_spike_stencil(self):
        # hand stencil arithmetic: spike v at one interior cell gives
        # -4 d v / h^2 there and d v / h^2 at the four neighbors
        g = GridSpec(0.0, 1.0, 0.0, 1.0, 8, 8)  # hx = hy = 0.125
        h = g.hx
        v, d = 2.5, 0.3
        values = np.zeros(g.shape)
        values[4, 4] = v
        out = apply_laplacian(ScalarField(g, values), d).values
        assert out[4, 4] == pytest.approx(-4 * d * v / h**2, rel=1e-13)
        for ix, iy in [(3, 4), (5, 4), (4, 3), (4, 5)]:
            assert out[ix, iy] == pytest.approx(d * v / h**2, rel=1e-13)
        assert out[4, 6] == 0.0 and out[1, 1] == 0.0

    def test_quadratic_interior_value(self):
        # f = x^2 has exact second difference 2 at interior cells
        g = GridSpec(nx=32, ny=8)
        X, _ = g.meshgrid()
        d = 1.7
        out = apply_laplacian(ScalarField(g, X**2), d).values
        interior = out[1:-1, :]
        assert interior == pytest.approx(2.0 * d, rel=1e-11)

    def test_neumann_cosine_mode_is_eigenfunction(self):
        g = GridSpec(nx=24, ny=10)
        d = 0.45
        for k in (1, 3, 7):
            x = g.x_centers()
            mode = np.cos(k * np.pi * (x - g.xmin) / (g.xmax - g.xmin))
            f = ScalarField(g, np.repeat(mode[:, None], g.ny, axis=1))
            lam = d * neumann_mode_eigenvalue(g.nx, g.hx, k)
            out = apply_laplacian(f, d)
            assert out.values == pytest.approx(lam * f.values, abs=1e-11 * abs(lam))

    def test_conservation_of_random_fields(self, small_grid, rng):
        for _ in range(10):
            f = random_field(small_grid, rng, lo=-3.0, hi=5.0)
            total = integrate(apply_laplacian(f, d=0.9))
            assert abs(total) <= 1e-12 * max(norm(f, "L1"), 1.0)

    def test_linearity(self, small_grid, rng):
        f = random_field(small_grid, rng)
        g = random_field(small_grid, rng)
        a, b = 2.25, -0.75
        combo = apply_laplacian(ScalarField(small_grid, a * f.values + b * g.values), 0.6)
        parts = a * apply_laplacian(f, 0.6).values + b * apply_laplacian(g, 0.6).values
        assert combo.values == pytest.approx(parts, abs=1e-12)

    def test_rejects_negative_diffusion(self, small_grid):
        with pytest.raises(ValueError):
            apply_laplacian(ScalarField.zeros(small_grid), d=-0.1)


class TestQuadrature:
    def test_zero_field(self, small_grid):
        assert integrate(ScalarField.zeros(small_grid)) == 0.0

    def test_unit_field_gives_domain_area(self):
        g = GridSpec(nx=37, ny=53)
        assert integrate(ScalarField.full(g, 1.0)) == pytest.approx(100.0, rel=1e-13)

    def test_gaussian_closed_form(self):
        # int exp(-5 |x|^2) over R^2 = pi/5; the tail outside (-5,5)^2 is
        # below 1e-50, so the midpoint rule on 256^2 must hit 1e-6
        g = GridSpec(nx=256, ny=256)
        X, Y = g.meshgrid()
        f = ScalarField(g, np.exp(-5.0 * (X**2 + Y**2)))
        assert integrate(f) == pytest.approx(np.pi / 5.0, abs=1e-6)

    def test_nonnegative_field_integrates_nonnegative(self, small_grid, rng):
        f = random_field(small_grid, rng, lo=0.0, hi=2.0)
        assert integrate(f) >= 0.0


class TestNorms:
    def test_zero_field_all_kinds(self, small_grid):
        z = ScalarField.zeros(small_grid)
        assert norm(z, "L1") == 0.0 and norm(z, "L2") == 0.0 and norm(z, "Linf") == 0.0

    def test_constant_negative_field(self):
        g = GridSpec(nx=20, ny=20)
        f = ScalarField.full(g, -2.0)
        assert norm(f, "L1") == pytest.approx(200.0, rel=1e-13)
        assert norm(f, "Linf") == 2.0

    def test_single_cell_linf(self, small_grid):
        values = np.zeros(small_grid.shape)
        values[2, 9] = 7.0
        assert norm(ScalarField(small_grid, values), "Linf") == 7.0

    def test_unknown_kind_rejected(self, small_grid):
        with pytest.raises(ValueError):
            norm(ScalarField.zeros(small_grid), "L3")


class TestGridMismatch:
    def test_mixing_grids_raises(self):
        from rdsir.grid import check_same_grid

        f = ScalarField.zeros(GridSpec(nx=8, ny=8))
        g = ScalarField.zeros(GridSpec(nx=16, ny=16))
        with pytest.raises(GridMismatchError):
            check_same_grid(f, g)


@given(
    value=st.floats(-1e3, 1e3),
    nx=st.integers(2, 20),
    ny=st.integers(2, 20),
)
@settings(max_examples=30, deadline=None)
def test_laplacian_of_any_constant_vanishes(value, nx, ny):
    g = GridSpec(nx=nx, ny=ny)
    out = apply_laplacian(ScalarField.full(g, value), d=0.25)
    assert np.all(out.values == 0.0)
