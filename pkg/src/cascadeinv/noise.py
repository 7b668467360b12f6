"""Synthetic noisy measurements.

    u_h = u_e + omega * p * max|u_e|,   v_h = v_e + omega * p * max|v_e|

with one independent standard-normal ``omega`` per node. Normals come
from the PCG64 generator through an explicit Box-Muller transform so a
seed reproduces the same data on every platform. Stream order: the u-field
nodes 0..N, then the v-field nodes 0..N.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError
from .grid import Grid1D, as_nodal, l2_norm_sq
from .objective import Measurement

__all__ = ["standard_normals", "add_noise", "noise_energy"]


def standard_normals(seed: int, count: int) -> np.ndarray:
    """``count`` N(0, 1) deviates from PCG64(seed) via Box-Muller."""
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = (count + 1) // 2
    uni = rng.random(2 * pairs)
    radius = np.sqrt(-2.0 * np.log1p(-uni[0::2]))  # 1 - U lies in (0, 1]
    angle = 2.0 * np.pi * uni[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:count]


def noise_energy(u_h, u_e, v_h, v_e, grid: Grid1D, data_weight: float = 1.0) -> float:
    """``eps = w/2 (||u_h - u_e||^2 + ||v_h - v_e||^2)``."""
    return 0.5 * data_weight * (l2_norm_sq(np.subtract(u_h, u_e), grid)
                                + l2_norm_sq(np.subtract(v_h, v_e), grid))


def add_noise(u_e, v_e, p: float, seed: int, grid: Grid1D, data_weight: float = 1.0) -> Measurement:
    """Perturb exact final states and record the resulting noise energy."""
    if not p >= 0:
        raise InputError(f"noise fraction must be non-negative, got {p!r}")
    u_e = as_nodal(u_e, grid, "u_e")
    v_e = as_nodal(v_e, grid, "v_e")
    if p == 0:
        return Measurement(u_e.copy(), v_e.copy(), 0.0, 0.0, seed)

    n = grid.n_nodes
    omega = standard_normals(seed, 2 * n)
    u_h = u_e + omega[:n] * p * np.max(np.abs(u_e))
    v_h = v_e + omega[n:] * p * np.max(np.abs(v_e))
    # adjoint final data must satisfy the homogeneous boundary conditions
    u_h[[0, -1]] = 0.0
    v_h[[0, -1]] = 0.0
    eps = noise_energy(u_h, u_e, v_h, v_e, grid, data_weight)
    return Measurement(u_h, v_h, float(p), eps, seed)
