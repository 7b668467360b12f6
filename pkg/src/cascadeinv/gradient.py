"""Frechet gradient of the Tikhonov functional.

The H1 Riesz representative of the misfit derivative is ``Lambda``, the
solution of ``Lambda'' - Lambda = int_0^T q_x v_x dt`` with homogeneous
Neumann conditions; the full gradient is ``Lambda + gamma * d``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .adjoint import residual_final_data, solve_adjoint
from .direct import Trajectory, _coef_array
from .errors import InputError
from .grid import Grid1D, as_nodal, l2_inner, simpson_weights

__all__ = [
    "GradientField",
    "time_weights",
    "assemble_gradient_source",
    "solve_lambda_bvp",
    "frechet_gradient",
    "duality_residual",
    "objective_gradient",
]


@dataclass(frozen=True)
class GradientField:
    lam: np.ndarray
    total: np.ndarray
    gamma: float


def time_weights(grid: Grid1D) -> np.ndarray:
    """Trapezoid weights on the time levels."""
    w = np.full(grid.n_steps + 1, grid.dt)
    w[[0, -1]] *= 0.5
    return w


def _space_derivative(rows: np.ndarray, dx: float) -> np.ndarray:
    return np.gradient(rows, dx, axis=1, edge_order=2)


def assemble_gradient_source(v_traj: Trajectory, q_traj: Trajectory, grid: Grid1D,
                             pairing: str = "scheme") -> np.ndarray:
    """``int_0^T q_x v_x dt`` at every node.

    ``pairing="scheme"`` mirrors the discrete direct and adjoint steps: it
    sums ``dt * q_x(t_{k-1}) v_x(t_k)`` over k = 1..n using cell-face
    differences and averages the two faces next to each node (end nodes
    take their single face). With adjoint data weighted to match the misfit
    quadrature, ``-dx * source`` (halved at the ends) is then the exact
    derivative of the discrete misfit with respect to the nodal values.

    ``pairing="trapezoid"`` applies the trapezoid rule in time to the
    same-time product of central differences. It is the textbook
    discretization, accurate only for smooth fields and carrying an O(dt)
    error.
    """
    if v_traj.grid != grid or q_traj.grid != grid:
        raise InputError("trajectories must live on the given grid")
    if pairing == "scheme":
        vx = np.diff(v_traj.v, axis=1) / grid.dx
        qx = np.diff(q_traj.v, axis=1) / grid.dx
        face = grid.dt * np.einsum("ki,ki->i", qx[:-1], vx[1:])
        out = np.empty(grid.n_nodes)
        out[1:-1] = 0.5 * (face[:-1] + face[1:])
        out[0], out[-1] = face[0], face[-1]
        return out
    if pairing == "trapezoid":
        vx = _space_derivative(v_traj.v, grid.dx)
        qx = _space_derivative(q_traj.v, grid.dx)
        return time_weights(grid) @ (qx * vx)
    raise InputError(f"unknown time pairing {pairing!r}")


def solve_lambda_bvp(g, grid: Grid1D) -> np.ndarray:
    """Solve ``L'' - L = g`` on (0, 1) with ``L'(0) = L'(1) = 0``.

    The Neumann conditions are imposed through mirrored ghost nodes, which
    keeps the system tridiagonal.
    """
    g = as_nodal(g, grid, "g")
    n = grid.n_nodes
    h2 = grid.dx**2
    ab = np.zeros((3, n))
    ab[1] = -2.0 / h2 - 1.0
    ab[0, 1:] = 1.0 / h2
    ab[2, :-1] = 1.0 / h2
    ab[0, 1] = 2.0 / h2
    ab[2, -2] = 2.0 / h2
    return solve_banded((1, 1), ab, g)


def frechet_gradient(d, v_traj: Trajectory, q_traj: Trajectory, gamma: float,
                     data_weight: float = 1.0, pairing: str = "scheme") -> GradientField:
    """Gradient ``Lambda + gamma d``.

    ``data_weight`` multiplies the misfit part of the functional; since the
    adjoint final data already carry the residual, it simply scales Lambda.
    """
    grid = v_traj.grid
    d = as_nodal(_coef_array(d), grid, "d")
    lam = data_weight * solve_lambda_bvp(
        assemble_gradient_source(v_traj, q_traj, grid, pairing), grid)
    return GradientField(lam, lam + gamma * d, float(gamma))


def objective_gradient(d, m, grid: Grid1D, u0, v0, gamma: float, data_weight: float = 1.0,
                       traj: Trajectory | None = None) -> GradientField:
    """Gradient of the Tikhonov functional at ``d`` from scratch.

    Runs the direct problem (unless ``traj`` is supplied), the adjoint with
    quadrature-weighted residual data, and the Neumann problem for Lambda.
    """
    from .objective import forward

    d = _coef_array(d)
    if traj is None:
        traj = forward(grid, d, u0, v0, cache=None)
    fd = residual_final_data(traj.u[-1], traj.v[-1], m, simpson_weights(grid) / grid.dx)
    adj = solve_adjoint(grid, d, fd)
    return frechet_gradient(d, traj, adj, gamma, data_weight)


def duality_residual(grid: Grid1D, delta_d, pT, qT, v_traj: Trajectory,
                     q_traj: Trajectory, diff_traj: Trajectory) -> float:
    """Discrete residual of the direct/adjoint duality identity.

    With ``(du, dv)`` the difference of two direct solutions for ``d + dd``
    and ``d``, ``v`` the base solution and ``q`` the adjoint solution,

        <pT, du(T)> + <qT, dv(T)> + int_0^T <dd (v_x + dv_x), q_x> dt

    vanishes for the continuous problem; the discrete value is a
    consistency error of order ``dx + dt``.
    """
    delta_d = as_nodal(delta_d, grid, "delta_d")
    lhs = l2_inner(pT, diff_traj.u[-1], grid) + l2_inner(qT, diff_traj.v[-1], grid)
    vx = _space_derivative(v_traj.v + diff_traj.v, grid.dx)
    qx = _space_derivative(q_traj.v, grid.dx)
    tw = time_weights(grid)
    per_level = np.array([l2_inner(delta_d * vx[j], qx[j], grid) for j in range(grid.n_steps + 1)])
    return float(lhs + tw @ per_level)
