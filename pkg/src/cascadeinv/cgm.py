"""Conjugate-gradient reconstruction of the dissipative coefficient.

Each iteration solves the direct problem, the adjoint problem with the
final-time residual as data, the Neumann problem for the gradient, and the
sensitivity problem along the search direction, which yields the step

    beta = [w<r_u, du(T)> + w<r_v, dv(T)> + gamma (d, q)_H1]
           / [w||du(T)||^2 + w||dv(T)||^2 + gamma ||q||_H1^2].

Iteration stops by the discrepancy rule ``J(d^n) <= rho * eps``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .direct import CoefficientField, Trajectory, _coef_array
from .errors import InputError, ZeroDirectionError
from .gradient import objective_gradient
from .grid import Grid1D, as_nodal, h1_inner, l2_inner, l2_norm, l2_norm_sq
from .objective import ForwardCache, Measurement, forward, regularization
from .sensitivity import solve_sensitivity

__all__ = [
    "Method",
    "StopReason",
    "OptimizerConfig",
    "IterationRecord",
    "ReconstructionResult",
    "conjugation_coefficient",
    "descent_direction",
    "step_size",
    "run",
]

log = logging.getLogger(__name__)

POSITIVITY_FLOOR = 1e-8
CLAMP_FLOOR = 1e-4


class Method(str, Enum):
    FLETCHER_REEVES = "FR"
    POLAK_RIBIERE = "PR"


class StopReason(str, Enum):
    DISCREPANCY = "Discrepancy"
    MAX_ITERATIONS = "MaxIterations"
    STAGNANT_STEP = "StagnantStep"
    # clean-data fallbacks: the discrepancy rule needs eps > 0
    ZERO_MISFIT = "ZeroMisfit"
    GRADIENT_NORM = "GradientNorm"


@dataclass
class OptimizerConfig:
    """Settings for :func:`run`.

    ``restart_cosine`` drops the conjugate term whenever the cosine between
    the search direction and the gradient (H1 metric) is not above it; the
    default 0 restarts only on genuine non-descent. ``keep_positive`` halves
    a step that would push any node below the positivity floor instead of
    clipping it there.
    """

    method: Method = Method.FLETCHER_REEVES
    gamma: float = 1e-6
    rho: float = 1.01
    max_iterations: int = 500
    initial_guess: CoefficientField | np.ndarray | float = 0.3
    clamp_to_bounds: bool = False
    restart_on_nondescent: bool = True
    data_weight: float = 1.0
    alpha0: float = CLAMP_FLOOR
    alpha1: float = np.inf
    max_halvings: int = 20
    grad_tol: float = 1e-12
    misfit_tol: float = 1e-12
    restart_cosine: float = 0.0
    keep_positive: bool = True

    def __post_init__(self):
        self.method = Method(self.method)
        if not self.rho > 1:
            raise InputError(f"rho must exceed 1, got {self.rho}")
        if not self.gamma > 0:
            raise InputError(f"gamma must be positive, got {self.gamma}")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be at least 1")
        if not self.data_weight > 0:
            raise InputError("data_weight must be positive")
        if not 0.0 <= self.restart_cosine < 1.0:
            raise InputError("restart_cosine must lie in [0, 1)")

    def initial_values(self, grid: Grid1D) -> np.ndarray:
        d0 = self.initial_guess
        if np.isscalar(d0):
            return np.full(grid.n_nodes, float(d0))
        return as_nodal(_coef_array(d0), grid, "initial_guess").copy()


@dataclass
class IterationRecord:
    n: int
    j_value: float
    beta: float
    mu: float
    error: float
    grad_norm: float
    halvings: int = 0
    restarted: bool = False


@dataclass
class ReconstructionResult:
    d_final: CoefficientField
    history: list[IterationRecord] = field(default_factory=list)
    stop_reason: StopReason = StopReason.MAX_ITERATIONS
    epsilon_used: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.history) - 1

    @property
    def final_j(self) -> float:
        return self.history[-1].j_value


def conjugation_coefficient(method, grad_n, grad_prev, grid: Grid1D, n: int = 1) -> float:
    """Fletcher-Reeves or Polak-Ribiere coefficient (L2 inner products)."""
    if n == 0 or grad_prev is None:
        return 0.0
    denom = l2_norm_sq(grad_prev, grid)
    if denom == 0.0:
        raise ZeroDirectionError("previous gradient vanished; the iteration has converged")
    method = Method(method)
    if method is Method.FLETCHER_REEVES:
        return l2_norm_sq(grad_n, grid) / denom
    return l2_inner(grad_n, np.subtract(grad_n, grad_prev), grid) / denom


def descent_direction(grad_n, q_prev, mu: float) -> np.ndarray:
    grad_n = np.asarray(grad_n, dtype=float)
    if q_prev is None or mu == 0.0:
        return grad_n.copy()
    return grad_n + mu * np.asarray(q_prev, dtype=float)


def step_size(d_n, q_n, m: Measurement, traj_n: Trajectory, grid: Grid1D, gamma: float,
              data_weight: float = 1.0) -> float:
    """Minimizer of the linearized model of ``beta -> J(d - beta q)``."""
    d_n = _coef_array(d_n)
    q_n = np.asarray(q_n, dtype=float)
    if not np.any(q_n):
        raise ZeroDirectionError("search direction is identically zero")
    sens = solve_sensitivity(grid, d_n, traj_n, q_n)
    du, dv = sens.u[-1], sens.v[-1]
    ru, rv = traj_n.u[-1] - m.m1, traj_n.v[-1] - m.m2
    num = data_weight * (l2_inner(ru, du, grid) + l2_inner(rv, dv, grid)) + gamma * h1_inner(d_n, q_n, grid)
    den = data_weight * (l2_norm_sq(du, grid) + l2_norm_sq(dv, grid)) + gamma * h1_inner(q_n, q_n, grid)
    if not den > 0:
        raise ZeroDirectionError("line-search denominator vanished")
    return num / den


class _State:
    """Objective pieces at one iterate, sharing the cached forward solve."""

    def __init__(self, d, m, grid, u0, v0, cfg, cache):
        self.d = d
        self.traj = forward(grid, d, u0, v0, cache)
        w = cfg.data_weight
        self.misfit = 0.5 * w * (l2_norm_sq(self.traj.u[-1] - m.m1, grid)
                                 + l2_norm_sq(self.traj.v[-1] - m.m2, grid))
        self.j = self.misfit + regularization(d, grid, cfg.gamma)


def _project(d: np.ndarray, cfg: OptimizerConfig) -> tuple[np.ndarray, int, int]:
    """Apply the optional clamp and the positivity floor; report node counts."""
    clamped = 0
    if cfg.clamp_to_bounds:
        out = np.clip(d, max(cfg.alpha0, CLAMP_FLOOR), cfg.alpha1)
        clamped = int(np.sum(out != d))
        d = out
    low = d < POSITIVITY_FLOOR
    return np.where(low, POSITIVITY_FLOOR, d), clamped, int(low.sum())


def run(config: OptimizerConfig, m: Measurement, grid: Grid1D, u0, v0, d_true=None,
        callback=None) -> ReconstructionResult:
    """Reconstruct ``d`` from ``m`` with the conjugate-gradient method.

    ``callback(record)`` is invoked after each history entry is appended.
    """
    cfg = config
    as_nodal(m.m1, grid, "m1")
    as_nodal(m.m2, grid, "m2")
    u0 = as_nodal(u0, grid, "u0")
    v0 = as_nodal(v0, grid, "v0")
    d_true = None if d_true is None else as_nodal(_coef_array(d_true), grid, "d_true")
    eps = float(m.epsilon)
    cache = ForwardCache(maxsize=4)

    def error_of(d):
        return float("nan") if d_true is None else l2_norm(d_true - d, grid)

    def gradient_at(state):
        return objective_gradient(state.d, m, grid, u0, v0, cfg.gamma, cfg.data_weight,
                                  traj=state.traj).total

    data_energy = 0.5 * cfg.data_weight * (l2_norm_sq(m.m1, grid) + l2_norm_sq(m.m2, grid))
    state = _State(cfg.initial_values(grid), m, grid, u0, v0, cfg, cache)
    history: list[IterationRecord] = []
    grad_prev = q_prev = None
    grad0_norm = None
    force_steepest = False
    n = 0
    reason = StopReason.MAX_ITERATIONS

    while True:
        grad = gradient_at(state)
        gnorm = l2_norm(grad, grid)
        grad0_norm = gnorm if grad0_norm is None else grad0_norm
        rec = IterationRecord(n, state.j, 0.0, 0.0, error_of(state.d), gnorm)
        history.append(rec)

        if eps > 0 and state.j <= cfg.rho * eps:
            reason = StopReason.DISCREPANCY
        elif eps == 0 and state.misfit <= cfg.misfit_tol * data_energy:
            reason = StopReason.ZERO_MISFIT
        elif eps == 0 and gnorm <= cfg.grad_tol * grad0_norm:
            reason = StopReason.GRADIENT_NORM
        elif gnorm == 0.0:
            reason = StopReason.GRADIENT_NORM
        elif n >= cfg.max_iterations:
            reason = StopReason.MAX_ITERATIONS
        else:
            reason = None
        if reason is not None:
            if callback:
                callback(rec)
            break

        if force_steepest or n == 0:
            mu = 0.0
        else:
            try:
                mu = conjugation_coefficient(cfg.method, grad, grad_prev, grid, n)
            except ZeroDirectionError:
                mu = 0.0
        force_steepest = False

        accepted = None
        for attempt_mu in ((mu, 0.0) if (mu != 0.0 and cfg.restart_on_nondescent) else (mu,)):
            q = descent_direction(grad, q_prev, attempt_mu)
            if attempt_mu != 0.0 and cfg.restart_on_nondescent:
                cos = h1_inner(grad, q, grid) / np.sqrt(h1_inner(grad, grad, grid) * h1_inner(q, q, grid))
                if not cos > cfg.restart_cosine:
                    log.info("iteration %d: direction cosine %.3e, restarting", n, cos)
                    continue
            try:
                beta = step_size(state.d, q, m, state.traj, grid, cfg.gamma, cfg.data_weight)
            except ZeroDirectionError:
                continue
            if not (np.isfinite(beta) and beta > 0):
                log.info("iteration %d: non-positive step %.3e with mu=%.3e", n, beta, attempt_mu)
                continue
            for halvings in range(cfg.max_halvings + 1):
                raw = state.d - beta * q
                crossing = (raw < POSITIVITY_FLOOR) & (state.d > 2 * POSITIVITY_FLOOR)
                if cfg.keep_positive and halvings < cfg.max_halvings and np.any(crossing):
                    beta *= 0.5
                    continue
                projected, clamped, floored = _project(raw, cfg)
                trial = _State(projected, m, grid, u0, v0, cfg, cache)
                if trial.j <= state.j:
                    accepted = (trial, beta, attempt_mu, q, halvings)
                    if clamped:
                        log.info("iteration %d: clamped %d nodes to [%g, %g]", n, clamped,
                                 max(cfg.alpha0, CLAMP_FLOOR), cfg.alpha1)
                    if floored:
                        log.warning("iteration %d: positivity floor applied at %d nodes", n, floored)
                    break
                beta *= 0.5
            if accepted:
                break
            log.info("iteration %d: no decrease along direction with mu=%.3e", n, attempt_mu)

        if accepted is None:
            reason = StopReason.STAGNANT_STEP
            if callback:
                callback(rec)
            break

        trial, beta, mu_used, q, halvings = accepted
        rec.beta, rec.mu, rec.halvings = float(beta), float(mu_used), halvings
        rec.restarted = mu_used == 0.0 and mu != 0.0
        if callback:
            callback(rec)
        grad_prev, q_prev = grad, q
        state = trial
        n += 1

    d_final = CoefficientField(state.d, cfg.alpha0 if cfg.clamp_to_bounds else None,
                               cfg.alpha1 if cfg.clamp_to_bounds else None)
    log.info("stopped after %d iterations: %s (J=%.4e, eps=%.4e)", n, reason.value, state.j, eps)
    return ReconstructionResult(d_final, history, reason, eps)
