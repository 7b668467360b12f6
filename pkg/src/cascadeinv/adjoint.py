"""Backward adjoint system and its final data.

    -p_t + p_xxxx = 0,             p(., T) = u(., T) - m1
    -q_t - (d q_x)_x = p,          q(., T) = v(., T) - m2

Solved forward in reversed time ``s = T - t`` with the same banded steps
as the direct problem, then flipped back to forward time order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .direct import CascadeStepper, Trajectory
from .errors import InputError
from .grid import Grid1D, as_nodal

if TYPE_CHECKING:
    from .objective import Measurement

__all__ = ["AdjointFinalData", "solve_adjoint", "residual_final_data"]


@dataclass(frozen=True)
class AdjointFinalData:
    pT: np.ndarray
    qT: np.ndarray


def solve_adjoint(grid: Grid1D, d, final_data: AdjointFinalData) -> Trajectory:
    stepper = CascadeStepper(grid, d)
    phi = as_nodal(final_data.pT, grid, "pT").copy()
    zeta = as_nodal(final_data.qT, grid, "qT").copy()
    phi[[0, -1]] = 0.0
    zeta[[0, -1]] = 0.0

    n = grid.n_steps
    ps = np.empty((n + 1, grid.n_nodes))
    qs = np.empty_like(ps)
    ps[n], qs[n] = phi, zeta
    for k in range(n):
        # zeta^{k+1} takes phi^k as source, mirroring the v-lag of the direct
        # scheme; u(T) does not see v(T), so the first step has no source
        zeta = stepper.heat_step(zeta, phi[1:-1] if k else None)
        phi = stepper.plate_step(phi)
        ps[n - k - 1], qs[n - k - 1] = phi, zeta
    return Trajectory(ps, qs, grid)


def residual_final_data(uT, vT, m: "Measurement", weights=None) -> AdjointFinalData:
    """Final data ``(u(T) - m1, v(T) - m2)`` for the adjoint problem.

    ``weights``, if given, multiplies both residuals node by node. Passing
    the quadrature weights divided by ``dx`` makes the adjoint the exact
    transpose of the quadrature-weighted misfit, which matters once the
    residual carries node-to-node noise.
    """
    uT = np.asarray(uT, dtype=float)
    vT = np.asarray(vT, dtype=float)
    if uT.shape != m.m1.shape or vT.shape != m.m2.shape:
        raise InputError(
            f"final state shapes {uT.shape}, {vT.shape} do not match measurement {m.m1.shape}"
        )
    ru, rv = uT - m.m1, vT - m.m2
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != ru.shape:
            raise InputError(f"weights have shape {weights.shape}, expected {ru.shape}")
        ru, rv = weights * ru, weights * rv
    return AdjointFinalData(ru, rv)
