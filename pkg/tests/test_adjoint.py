import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cascadeinv.adjoint import AdjointFinalData, residual_final_data, solve_adjoint
from cascadeinv.direct import solve_direct
from cascadeinv.errors import InputError
from cascadeinv.grid import Grid1D, l2_norm_sq, simpson_weights
from cascadeinv.objective import Measurement, misfit_parts

PI = np.pi


def test_zero_final_data(grid100):
    z = np.zeros(101)
    tr = solve_adjoint(grid100, np.full(101, 0.2), AdjointFinalData(z, z))
    assert not tr.u.any() and not tr.v.any()


def test_backward_heat_decay(grid100):
    x = grid100.x
    tr = solve_adjoint(grid100, np.full(101, 0.1), AdjointFinalData(0 * x, np.sin(PI * x)))
    assert not tr.u.any()
    exact = np.exp(-0.1 * PI**2) * np.sin(PI * x)
    assert np.max(np.abs(tr.v[0] - exact)) <= 0.05 * np.max(exact)
    assert np.array_equal(tr.v[-1], np.sin(PI * x) * (x > 0) * (x < 1))


def test_time_reversed_plate_stencil(grid100):
    x = grid100.x
    tr = solve_adjoint(grid100, np.full(101, 0.3), AdjointFinalData(np.sin(2 * PI * x), 0 * x))
    s = 1 / grid100.dx**4
    for j in (0, 50, 99):
        p = np.concatenate(([-tr.u[j, 1]], tr.u[j], [-tr.u[j, -2]]))
        d4 = s * (p[4:] - 4 * p[3:-1] + 6 * p[2:-2] - 4 * p[1:-3] + p[:-4])
        res = -(tr.u[j + 1, 1:-1] - tr.u[j, 1:-1]) / grid100.dt + d4
        assert np.max(np.abs(res)) <= 1e-10 * max(1.0, np.max(np.abs(d4)))


def test_residual_final_data_examples(grid100):
    x = grid100.x
    u, v = np.sin(PI * x), x * (1 - x)
    fd = residual_final_data(u, v, Measurement(u, v))
    assert not fd.pT.any() and not fd.qT.any()
    fd = residual_final_data(u, v, Measurement(0 * x, v))
    assert np.array_equal(fd.pT, u)


def test_residual_weights_and_shape_check(grid100):
    x = grid100.x
    m = Measurement(0 * x, 0 * x)
    w = simpson_weights(grid100) / grid100.dx
    fd = residual_final_data(x, x, m, w)
    assert np.allclose(fd.pT, w * x)
    with pytest.raises(InputError):
        residual_final_data(np.ones(50), np.ones(50), m)
    with pytest.raises(InputError):
        residual_final_data(x, x, m, np.ones(3))


def test_residual_energy_is_twice_the_misfit(example1):
    grid, d, u0, v0 = example1
    rng = np.random.default_rng(5)
    tr = solve_direct(grid, d, u0, v0)
    m = Measurement(tr.u[-1] + 1e-3 * rng.normal(size=101), tr.v[-1] + 1e-2 * rng.normal(size=101))
    trial = solve_direct(grid, d.values + 0.02, u0, v0)
    fd = residual_final_data(trial.u[-1], trial.v[-1], m)
    ju, jv = misfit_parts(d.values + 0.02, m, grid, u0, v0, cache=None)
    assert l2_norm_sq(fd.pT, grid) + l2_norm_sq(fd.qT, grid) == pytest.approx(2 * (ju + jv), rel=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_adjoint_energy_bounds(seed):
    grid = Grid1D(20)
    rng = np.random.default_rng(seed)
    pT, qT = rng.normal(size=(2, 21))
    pT[[0, -1]] = qT[[0, -1]] = 0
    d = rng.uniform(0.05, 1.5, size=21)
    tr = solve_adjoint(grid, d, AdjointFinalData(pT, qT))
    pe = (tr.u**2).sum(axis=1)
    # in reversed time the plate energy decays, i.e. it grows with j
    assert np.all(np.diff(pe) >= -1e-12 * pe[-1])
    total = pe + (tr.v**2).sum(axis=1)
    assert np.all(total <= np.exp(grid.t_final) * total[-1] * (1 + 10 * grid.dt))
