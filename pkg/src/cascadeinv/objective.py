"""Regularized Tikhonov functional

    J(d) = w/2 ||u(T; d) - m1||^2 + w/2 ||v(T; d) - m2||^2 + gamma/2 ||d||_H1^2

with Simpson-quadrature norms. ``w`` (``data_weight``) is 1 for the plain
functional; ``w = N`` puts the misfit on the scale of unweighted nodal sums.
"""
from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .direct import Trajectory, _coef_array, solve_direct
from .errors import InputError
from .grid import Grid1D, as_nodal, h1_norm_sq, l2_norm_sq

__all__ = ["Measurement", "ForwardCache", "forward", "evaluate", "misfit_parts", "regularization"]


@dataclass(frozen=True)
class Measurement:
    """Final-time data with the noise metadata it was generated with."""

    m1: np.ndarray
    m2: np.ndarray
    noise_level_p: float = 0.0
    epsilon: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        for name in ("m1", "m2"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                raise InputError(f"{name} must be a finite 1-D array")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.m1.shape != self.m2.shape:
            raise InputError("m1 and m2 must have the same length")
        if self.epsilon < 0 or self.noise_level_p < 0:
            raise InputError("noise level and epsilon must be non-negative")


class ForwardCache:
    """Small LRU cache of forward trajectories keyed by the input bytes.

    Lookups and insertions are serialized with a lock, so one cache can be
    shared by threads; the cached trajectories themselves are read-only.
    """

    def __init__(self, maxsize: int = 8):
        self.maxsize = maxsize
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(grid: Grid1D, d, u0, v0):
        return (grid, _coef_array(d).tobytes(), np.asarray(u0, float).tobytes(),
                np.asarray(v0, float).tobytes())

    def get(self, grid: Grid1D, d, u0, v0) -> Trajectory:
        k = self.key(grid, d, u0, v0)
        with self._lock:
            if k in self._data:
                self._data.move_to_end(k)
                self.hits += 1
                return self._data[k]
        traj = solve_direct(grid, d, u0, v0)
        with self._lock:
            self.misses += 1
            self._data[k] = traj
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)
        return traj

    def clear(self):
        with self._lock:
            self._data.clear()


_default_cache = ForwardCache()


def forward(grid: Grid1D, d, u0, v0, cache: ForwardCache | None = _default_cache) -> Trajectory:
    """Forward trajectory for ``d``, reused from ``cache`` when possible."""
    if cache is None:
        return solve_direct(grid, d, u0, v0)
    return cache.get(grid, d, u0, v0)


def _check(m: Measurement, grid: Grid1D):
    as_nodal(m.m1, grid, "m1")
    as_nodal(m.m2, grid, "m2")


def misfit_parts(d, m: Measurement, grid: Grid1D, u0, v0, data_weight: float = 1.0,
                 cache: ForwardCache | None = _default_cache) -> tuple[float, float]:
    """The u- and v-halves of the data misfit."""
    _check(m, grid)
    traj = forward(grid, d, u0, v0, cache)
    ju = 0.5 * data_weight * l2_norm_sq(traj.u[-1] - m.m1, grid)
    jv = 0.5 * data_weight * l2_norm_sq(traj.v[-1] - m.m2, grid)
    return ju, jv


def regularization(d, grid: Grid1D, gamma: float) -> float:
    return 0.5 * gamma * h1_norm_sq(_coef_array(d), grid)


def evaluate(d, m: Measurement, grid: Grid1D, gamma: float, u0, v0, data_weight: float = 1.0,
             cache: ForwardCache | None = _default_cache) -> float:
    if gamma < 0:
        raise InputError(f"gamma must be non-negative, got {gamma}")
    ju, jv = misfit_parts(d, m, grid, u0, v0, data_weight, cache)
    return ju + jv + regularization(d, grid, gamma)
