"""Linearized (sensitivity) system for a coefficient perturbation ``dd``.

    du_t + du_xxxx = dv,                  du(., 0) = 0
    dv_t - (d dv_x)_x = (dd v_x)_x,       dv(., 0) = 0

With the source evaluated at the new level ``v^{j+1}`` this is the exact
derivative of :func:`~cascadeinv.direct.solve_direct` with respect to the
coefficient, so ``u(d + e*dd) - u(d) - e*du = O(e^2)`` on every grid.
"""
from __future__ import annotations

import numpy as np

from .direct import CascadeStepper, Trajectory, flux_divergence
from .errors import InputError
from .grid import Grid1D, as_nodal

__all__ = ["solve_sensitivity"]


def solve_sensitivity(grid: Grid1D, d, v_traj: Trajectory, delta_d) -> Trajectory:
    if v_traj.grid != grid:
        raise InputError("base trajectory was computed on a different grid")
    delta_d = as_nodal(delta_d, grid, "delta_d")
    stepper = CascadeStepper(grid, d)

    shape = (grid.n_steps + 1, grid.n_nodes)
    dus = np.zeros(shape)
    dvs = np.zeros(shape)
    if not np.any(delta_d):
        return Trajectory(dus, dvs, grid)

    du = dus[0].copy()
    dv = dvs[0].copy()
    for j in range(grid.n_steps):
        src = flux_divergence(delta_d, v_traj.v[j + 1], grid.dx)
        dv_new = stepper.heat_step(dv, src)
        du = stepper.plate_step(du, dv[1:-1])
        dv = dv_new
        dus[j + 1], dvs[j + 1] = du, dv
    return Trajectory(dus, dvs, grid)
