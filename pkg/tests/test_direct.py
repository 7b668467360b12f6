import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cascadeinv.direct import CoefficientField, Trajectory, final_state, solve_direct
from cascadeinv.errors import CoefficientError, InputError
from cascadeinv.grid import Grid1D, nodal_sum_sq

PI = np.pi


def manufactured_sources(d, dprime):
    g = lambda t, x: np.sin(PI * x) - t * PI * (dprime(x) * np.cos(PI * x) - PI * d(x) * np.sin(PI * x))
    f = lambda t, x: np.sin(PI * x) + t * PI**4 * np.sin(PI * x) - t * np.sin(PI * x)
    return f, g


def mms_error(n, n_steps=None):
    grid = Grid1D(n, n_steps=n_steps)
    d = lambda x: 1 + 0.5 * np.sin(PI * x)
    dp = lambda x: 0.5 * PI * np.cos(PI * x)
    f, g = manufactured_sources(d, dp)
    x = grid.x
    tr = solve_direct(grid, d(x), 0 * x, 0 * x, f_src=f, g_src=g)
    exact = np.sin(PI * x)
    return max(np.abs(tr.u[-1] - exact).max(), np.abs(tr.v[-1] - exact).max())


def test_zero_data_gives_zero(grid100):
    z = np.zeros(101)
    tr = solve_direct(grid100, np.full(101, 0.3), z, z)
    assert not tr.u.any() and not tr.v.any()


def test_heat_mode_decay(grid100):
    x = grid100.x
    tr = solve_direct(grid100, np.full(101, 0.1), 0 * x, np.sin(PI * x))
    exact = np.exp(-0.1 * PI**2) * np.sin(PI * x)
    assert np.max(np.abs(tr.v[-1] - exact)) <= 0.05 * np.max(np.abs(exact))


def test_example1_final_norms(example1):
    grid, d, u0, v0 = example1
    u, v = final_state(solve_direct(grid, d, u0, v0))
    assert nodal_sum_sq(u) == pytest.approx(7.39e-4, rel=0.1)
    assert nodal_sum_sq(v) == pytest.approx(7.554, rel=0.1)


def test_example2_final_norm(example2):
    grid, d, u0, v0 = example2
    _, v = final_state(solve_direct(grid, d, u0, v0))
    assert nodal_sum_sq(v) == pytest.approx(0.3576, rel=0.1)


def test_final_state_is_last_row_with_zero_boundary(example1):
    grid, d, u0, v0 = example1
    tr = solve_direct(grid, d, u0, v0)
    u, v = final_state(tr)
    assert np.array_equal(u, tr.u[-1]) and np.array_equal(v, tr.v[-1])
    assert u[0] == u[-1] == v[0] == v[-1] == 0.0
    assert np.array_equal(tr.v[0], v0) and np.array_equal(tr.u[0], u0)


def test_final_state_of_zero_trajectory(grid100):
    z = np.zeros((101, 101))
    u, v = final_state(Trajectory(z, z, grid100))
    assert not u.any() and not v.any()


def test_boundary_rows_exactly_zero(example1):
    grid, d, u0, v0 = example1
    tr = solve_direct(grid, d, u0, v0)
    for arr in (tr.u, tr.v):
        assert not arr[:, 0].any() and not arr[:, -1].any()


def test_trajectory_is_read_only(example1):
    grid, d, u0, v0 = example1
    tr = solve_direct(grid, d, u0, v0)
    with pytest.raises(ValueError):
        tr.v[3, 3] = 1.0


@pytest.mark.parametrize("bad", [np.full(101, -0.1), np.zeros(101)])
def test_non_positive_coefficient_rejected(grid100, bad):
    with pytest.raises(CoefficientError):
        solve_direct(grid100, bad, np.zeros(101), np.zeros(101))


def test_coefficient_vanishing_only_at_end_nodes_is_accepted(grid100):
    x = grid100.x
    tr = solve_direct(grid100, x * (1 - x), 0 * x, np.sin(PI * x))
    assert np.all(np.isfinite(tr.v))


def test_shape_errors(grid100):
    with pytest.raises(InputError):
        solve_direct(grid100, np.ones(50), np.zeros(101), np.zeros(101))
    with pytest.raises(InputError):
        solve_direct(grid100, np.ones(101), np.zeros(101), np.zeros(101), f_src=np.zeros((3, 101)))


def test_coefficient_field_admissibility(grid100):
    x = grid100.x
    cf = CoefficientField(0.2 + x, alpha0=0.1, alpha1=2.0, alpha2=5.0)
    assert cf.is_admissible(grid100)
    assert not cf.with_values(x).is_admissible(grid100)
    assert not CoefficientField(0.2 + x, alpha2=0.5).is_admissible(grid100)


def test_plate_stencil_residual(example1):
    grid, d, u0, v0 = example1
    tr = solve_direct(grid, d, u0, v0)
    s = 1 / grid.dx**4
    for j in (0, 10, 99):
        u = np.concatenate(([-tr.u[j + 1, 1]], tr.u[j + 1], [-tr.u[j + 1, -2]]))
        d4 = s * (u[4:] - 4 * u[3:-1] + 6 * u[2:-2] - 4 * u[1:-3] + u[:-4])
        res = (tr.u[j + 1, 1:-1] - tr.u[j, 1:-1]) / grid.dt + d4 - tr.v[j, 1:-1]
        assert np.max(np.abs(res)) <= 1e-8 * (1 + np.max(np.abs(d4)))


def test_manufactured_solution_first_order_in_time():
    errs = [mms_error(n) for n in (25, 50, 100, 200)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(1.8 < r < 2.2 for r in ratios), ratios


def test_manufactured_solution_second_order_in_space():
    # dt tied to dx^2 isolates the spatial error
    errs = [mms_error(n, n_steps=n * n) for n in (10, 20, 40)]
    assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5


coef = st.lists(st.floats(0.01, 2.0), min_size=21, max_size=21)


@given(coef, st.integers(0, 2**32 - 1))
def test_v_energy_non_increasing(values, seed):
    grid = Grid1D(20)
    rng = np.random.default_rng(seed)
    v0 = rng.normal(size=21)
    v0[[0, -1]] = 0
    tr = solve_direct(grid, np.array(values), np.zeros(21), v0)
    energy = (tr.v**2).sum(axis=1)
    assert np.all(np.diff(energy) <= 1e-12 * energy[0])


@given(coef, st.integers(0, 2**32 - 1))
def test_gronwall_bound(values, seed):
    grid = Grid1D(20)
    rng = np.random.default_rng(seed)
    u0, v0 = rng.normal(size=(2, 21))
    u0[[0, -1]] = v0[[0, -1]] = 0
    tr = solve_direct(grid, np.array(values), u0, v0)
    e = (tr.u**2).sum(axis=1) + (tr.v**2).sum(axis=1)
    assert np.all(e <= np.exp(grid.t) * e[0] * (1 + 10 * grid.dt))


@given(coef, st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_linearity_in_initial_data(values, a, b, seed):
    grid = Grid1D(20)
    d = np.array(values)
    rng = np.random.default_rng(seed)
    u0, v0, u1, v1 = rng.normal(size=(4, 21))
    for arr in (u0, v0, u1, v1):
        arr[[0, -1]] = 0
    t0 = solve_direct(grid, d, u0, v0)
    t1 = solve_direct(grid, d, u1, v1)
    tc = solve_direct(grid, d, a * u0 + b * u1, a * v0 + b * v1)
    scale = 1 + np.abs(tc.u).max() + np.abs(tc.v).max()
    assert np.allclose(tc.u, a * t0.u + b * t1.u, atol=1e-10 * scale)
    assert np.allclose(tc.v, a * t0.v + b * t1.v, atol=1e-10 * scale)
