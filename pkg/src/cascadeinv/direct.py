"""Implicit finite-difference solver for the forward cascade system.

    u_t + u_xxxx = v + f,        u = u_xx = 0 on the boundary,
    v_t - (d(x) v_x)_x = g,      v = 0 on the boundary.

Each step advances ``v`` with the backward-Euler control-volume scheme
(a tridiagonal SPD system) and then ``u`` with the backward-Euler
bilaplacian (a pentadiagonal SPD system) whose right-hand side uses the
*previous* ``v`` level.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import CoefficientError, InputError
from .grid import Grid1D, as_nodal, h1_norm_sq

__all__ = [
    "CoefficientField",
    "Trajectory",
    "solve_direct",
    "final_state",
    "flux_divergence",
    "CascadeStepper",
]


@dataclass(frozen=True)
class CoefficientField:
    """Nodal values of the dissipative coefficient with optional bounds."""

    values: np.ndarray
    alpha0: float | None = None
    alpha1: float | None = None
    alpha2: float | None = None

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise InputError("coefficient values must be a finite 1-D array")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def is_admissible(self, grid: Grid1D) -> bool:
        """Check the pointwise and H1 bounds that were supplied."""
        d = self.values
        if self.alpha0 is not None and np.any(d < self.alpha0):
            return False
        if self.alpha1 is not None and np.any(d > self.alpha1):
            return False
        if self.alpha2 is not None and h1_norm_sq(d, grid) > self.alpha2**2:
            return False
        return True

    def with_values(self, values) -> "CoefficientField":
        return CoefficientField(values, self.alpha0, self.alpha1, self.alpha2)


def _coef_array(d) -> np.ndarray:
    return d.values if isinstance(d, CoefficientField) else np.asarray(d, dtype=float)


@dataclass(frozen=True)
class Trajectory:
    """Space-time history of a field pair; row ``j`` is time level ``t_j``.

    ``u`` holds the fourth-order field (u, p or du) and ``v`` the
    second-order one (v, q or dv).
    """

    u: np.ndarray
    v: np.ndarray
    grid: Grid1D

    def __post_init__(self):
        shape = (self.grid.n_steps + 1, self.grid.n_nodes)
        for name in ("u", "v"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise InputError(f"trajectory field {name} has shape {arr.shape}, expected {shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def flux_divergence(coef: np.ndarray, w: np.ndarray, dx: float) -> np.ndarray:
    """Control-volume ``(coef w_x)_x`` at the interior nodes.

    Face values of ``coef`` are arithmetic means of the adjacent nodes.
    """
    face = 0.5 * (coef[1:] + coef[:-1])
    flux = face * np.diff(w)
    return np.diff(flux) / dx**2


@lru_cache(maxsize=32)
def _plate_factor(n_cells: int, dt: float) -> np.ndarray:
    n = n_cells - 1
    s = dt * n_cells**4
    ab = np.zeros((3, n))
    ab[2] = 1.0 + 6.0 * s
    # ghost values u_{-1} = -u_1 and u_{N+1} = -u_{N-1} enforce u_xx = 0
    ab[2, 0] = ab[2, -1] = 1.0 + 5.0 * s
    ab[1, 1:] = -4.0 * s
    ab[0, 2:] = s
    factor = cholesky_banded(ab, lower=False)
    factor.setflags(write=False)
    return factor


class CascadeStepper:
    """Backward-Euler steps for the two halves of the cascade on a fixed grid.

    The heat matrix depends on the coefficient and is factored once per
    instance; the plate matrix depends only on the grid and is shared.
    """

    def __init__(self, grid: Grid1D, d):
        d = _coef_array(d)
        as_nodal(d, grid, "coefficient")
        face = 0.5 * (d[1:] + d[:-1])
        # only face averages enter the scheme, so a coefficient that touches
        # zero at an end node (e.g. x(1 - x)) is still well posed
        if np.any(d < 0.0) or np.any(face <= 0.0):
            i = int(np.argmin(d))
            raise CoefficientError(f"coefficient must be positive, d[{i}] = {d[i]:.3e}")
        self.grid = grid
        self.d = d
        r = grid.dt / grid.dx**2
        n = grid.n_cells - 1
        ab = np.zeros((2, n))
        ab[1] = 1.0 + r * (face[:-1] + face[1:])
        ab[0, 1:] = -r * face[1:-1]
        self._heat = cholesky_banded(ab, lower=False)
        self._plate = _plate_factor(grid.n_cells, grid.dt)

    def heat_step(self, v: np.ndarray, source: np.ndarray | None = None) -> np.ndarray:
        """``(I - dt (d .)_xx) v_new = v + dt * source`` on interior nodes."""
        rhs = v[1:-1].copy()
        if source is not None:
            rhs += self.grid.dt * source
        out = np.zeros_like(v)
        out[1:-1] = cho_solve_banded((self._heat, False), rhs)
        return out

    def plate_step(self, u: np.ndarray, source: np.ndarray | None = None) -> np.ndarray:
        """``(I + dt D4) u_new = u + dt * source`` on interior nodes."""
        rhs = u[1:-1].copy()
        if source is not None:
            rhs += self.grid.dt * source
        out = np.zeros_like(u)
        out[1:-1] = cho_solve_banded((self._plate, False), rhs)
        return out


def _source_rows(src, grid: Grid1D, name: str):
    if src is None:
        return None
    if callable(src):
        x = grid.x
        return np.array([np.broadcast_to(src(t, x), x.shape) for t in grid.t], dtype=float)
    arr = np.asarray(src, dtype=float)
    if arr.shape != (grid.n_steps + 1, grid.n_nodes):
        raise InputError(f"{name} must have shape {(grid.n_steps + 1, grid.n_nodes)}, got {arr.shape}")
    return arr


def solve_direct(grid: Grid1D, d, u0, v0, f_src=None, g_src=None) -> Trajectory:
    """Solve the forward cascade system and keep every time level.

    Parameters
    ----------
    grid : Grid1D
    d : CoefficientField or array
        Strictly positive diffusion coefficient at the nodes.
    u0, v0 : array
        Initial data; boundary entries are forced to zero.
    f_src, g_src : array or callable, optional
        Manufactured source terms for the u- and v-equations, given either
        as ``(n_steps + 1, N + 1)`` arrays or as ``f(t, x)``. Level ``j`` is
        used for the step ``j -> j + 1``.
    """
    stepper = CascadeStepper(grid, d)
    u = as_nodal(u0, grid, "u0").copy()
    v = as_nodal(v0, grid, "v0").copy()
    u[[0, -1]] = 0.0
    v[[0, -1]] = 0.0
    f = _source_rows(f_src, grid, "f_src")
    g = _source_rows(g_src, grid, "g_src")

    us = np.empty((grid.n_steps + 1, grid.n_nodes))
    vs = np.empty_like(us)
    us[0], vs[0] = u, v
    for j in range(grid.n_steps):
        v_new = stepper.heat_step(v, None if g is None else g[j, 1:-1])
        drive = v[1:-1] if f is None else v[1:-1] + f[j, 1:-1]
        u = stepper.plate_step(u, drive)
        v = v_new
        us[j + 1], vs[j + 1] = u, v
    return Trajectory(us, vs, grid)


def final_state(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Return copies of ``(u(., T), v(., T))``."""
    return traj.u[-1].copy(), traj.v[-1].copy()
