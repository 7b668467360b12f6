"""Uniform space-time grid, Simpson quadrature and the L2/H1 inner products.

Every spatial integral in the package goes through :func:`simpson_weights`,
so the functional, the gradient and the line search all see the same
discrete measure.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError

__all__ = [
    "Grid1D",
    "as_nodal",
    "simpson_weights",
    "simpson_integrate",
    "l2_inner",
    "l2_norm_sq",
    "l2_norm",
    "h1_inner",
    "h1_norm_sq",
    "derivative",
    "nodal_sum_sq",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on (0, 1) x (0, T).

    ``n_steps`` defaults to ``n_cells`` (dt = T/N), which is the only
    configuration used for reconstructions. A different step count is
    accepted so that temporal and spatial convergence can be studied
    separately.
    """

    n_cells: int
    t_final: float = 1.0
    n_steps: int | None = None

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 4:
            raise InputError(f"n_cells must be an integer >= 4, got {self.n_cells!r}")
        if not (self.t_final > 0 and np.isfinite(self.t_final)):
            raise InputError(f"t_final must be positive, got {self.t_final!r}")
        if self.n_steps is None:
            object.__setattr__(self, "n_steps", int(self.n_cells))
        elif int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InputError(f"n_steps must be a positive integer, got {self.n_steps!r}")

    @property
    def dx(self) -> float:
        return 1.0 / self.n_cells

    @property
    def dt(self) -> float:
        return self.t_final / self.n_steps

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_nodes)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.n_steps + 1)

    def evaluate(self, func) -> np.ndarray:
        """Sample a callable of ``x`` at the grid nodes."""
        return as_nodal(np.broadcast_to(func(self.x), (self.n_nodes,)).astype(float), self)


def as_nodal(values, grid: Grid1D, name: str = "field") -> np.ndarray:
    """Validate ``values`` as a finite nodal function on ``grid``."""
    arr = np.asarray(values, dtype=float)
    if arr.shape != (grid.n_nodes,):
        raise InputError(
            f"{name} has shape {arr.shape}, expected ({grid.n_nodes},) for N={grid.n_cells}"
        )
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


@lru_cache(maxsize=64)
def _weights(n_cells: int) -> np.ndarray:
    h = 1.0 / n_cells
    w = np.zeros(n_cells + 1)
    # Simpson needs an even number of intervals; an odd N closes the last
    # interval with the trapezoid rule.
    m = n_cells if n_cells % 2 == 0 else n_cells - 1
    w[0:m + 1:2] += 2.0 * h / 3.0
    w[1:m:2] += 4.0 * h / 3.0
    w[0] -= h / 3.0
    w[m] -= h / 3.0
    if m < n_cells:
        w[m] += h / 2.0
        w[n_cells] += h / 2.0
    w.setflags(write=False)
    return w


def simpson_weights(grid: Grid1D) -> np.ndarray:
    """Composite Simpson weights for the grid nodes (read-only)."""
    return _weights(grid.n_cells)


def simpson_integrate(f, grid: Grid1D) -> float:
    """Approximate the integral of a nodal function over (0, 1)."""
    f = as_nodal(f, grid)
    return float(simpson_weights(grid) @ f)


def l2_inner(f, g, grid: Grid1D) -> float:
    f = as_nodal(f, grid, "f")
    g = as_nodal(g, grid, "g")
    return float(simpson_weights(grid) @ (f * g))


def l2_norm_sq(f, grid: Grid1D) -> float:
    return l2_inner(f, f, grid)


def l2_norm(f, grid: Grid1D) -> float:
    return float(np.sqrt(max(l2_norm_sq(f, grid), 0.0)))


def derivative(f, grid: Grid1D) -> np.ndarray:
    """Central differences inside, second-order one-sided at the two ends."""
    f = as_nodal(f, grid)
    return np.gradient(f, grid.dx, edge_order=2)


def h1_inner(f, g, grid: Grid1D) -> float:
    """``(f, g)_H1 = (f, g) + (f', g')`` with finite-difference derivatives."""
    f = as_nodal(f, grid, "f")
    g = as_nodal(g, grid, "g")
    w = simpson_weights(grid)
    return float(w @ (f * g) + w @ (derivative(f, grid) * derivative(g, grid)))


def h1_norm_sq(f, grid: Grid1D) -> float:
    return h1_inner(f, f, grid)


def nodal_sum_sq(f) -> float:
    """Plain sum of squared nodal values, with no mesh weight.

    This is the convention behind the reference final-time norms
    (it is roughly ``N`` times the L2 norm squared).
    """
    f = np.asarray(f, dtype=float)
    return float(f @ f)
