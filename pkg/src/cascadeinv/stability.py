"""Closed-form stability quantities for the coefficient reconstruction.

    T* = gamma a^3 / [(a^3 + 5a^2 + 2a + 2)(|u0|^2 + |v0|^2) + (2a^2 + 1)(|m1|^2 + |m2|^2)]
    L(T) = sqrt(2 (1 + T e^T) / (gamma a))

with ``a = alpha0`` the lower bound of the coefficient. ``beta1`` is the
time-dependent factor whose ratio to gamma must stay below one half for the
Lipschitz estimate to hold; it involves an interpolation (Ehrling) constant
that has no known value and therefore must be supplied by the caller.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateInputError, InputError

__all__ = [
    "StabilityInputs",
    "StabilityRow",
    "t_star",
    "stability_constant",
    "beta1",
    "admissible_time_bound",
    "stability_table",
    "TABLE_GAMMAS",
    "REFERENCE_INPUTS",
]

TABLE_GAMMAS = (1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10)


@dataclass(frozen=True)
class StabilityInputs:
    gamma: float
    alpha0: float
    norm_u0_sq: float
    norm_v0_sq: float
    norm_m1_sq: float
    norm_m2_sq: float
    ehrling_c: float | None = None

    def __post_init__(self):
        if not (self.gamma > 0 and self.alpha0 > 0):
            raise InputError("gamma and alpha0 must be positive")
        norms = (self.norm_u0_sq, self.norm_v0_sq, self.norm_m1_sq, self.norm_m2_sq)
        if any(not (v >= 0 and math.isfinite(v)) for v in norms):
            raise InputError("squared norms must be finite and non-negative")
        if self.ehrling_c is not None and not self.ehrling_c >= 0:
            raise InputError("ehrling_c must be non-negative")

    def with_gamma(self, gamma: float) -> "StabilityInputs":
        return StabilityInputs(gamma, self.alpha0, self.norm_u0_sq, self.norm_v0_sq,
                               self.norm_m1_sq, self.norm_m2_sq, self.ehrling_c)


# Reference norm values for the two benchmark problems (alpha0 = 1e4, gamma
# is replaced row by row when the tables are built).
REFERENCE_INPUTS = {
    1: StabilityInputs(1e-5, 1e4, 0.0, 0.1963, 7.3947e-4, 7.5540),
    2: StabilityInputs(1e-5, 1e4, 0.0, 0.5, 4.0266e-5, 0.3576),
}


@dataclass(frozen=True)
class StabilityRow:
    gamma: float
    t_star: float
    constant: float


def t_star(inp: StabilityInputs) -> float:
    a = inp.alpha0
    init = inp.norm_u0_sq + inp.norm_v0_sq
    data = inp.norm_m1_sq + inp.norm_m2_sq
    denom = (a**3 + 5 * a**2 + 2 * a + 2) * init + (2 * a**2 + 1) * data
    if denom == 0.0:
        raise DegenerateInputError("all norms are zero; the time bound is unbounded")
    return inp.gamma * a**3 / denom


def stability_constant(t0: float, gamma: float, alpha0: float) -> float:
    if t0 < 0:
        raise InputError(f"time must be non-negative, got {t0}")
    return math.sqrt(2.0 * (1.0 + t0 * math.exp(t0)) / (gamma * alpha0))


def beta1(t: float, inp: StabilityInputs) -> float:
    """Evaluate the factor ``beta1(T)`` literally."""
    if inp.ehrling_c is None:
        raise InputError("beta1 needs an explicit Ehrling constant")
    if t < 0:
        raise InputError(f"time must be non-negative, got {t}")
    a, c = inp.alpha0, inp.ehrling_c
    et = math.exp(t)
    s = 1.0 + t * et
    init = inp.norm_u0_sq + inp.norm_v0_sq
    data = inp.norm_m1_sq + inp.norm_m2_sq
    first = s * (2 * a**2 + 1 + t * et) * (2 * et * init + data)
    second = ((2 * a * s + a**2) * (s + 4 * c * t * et) * (1 + a) + 2 * et * s**2) * init
    return (first + second) / (2 * a**3)


def admissible_time_bound(inp: StabilityInputs, t_max: float = 50.0, tol: float = 1e-12) -> float | None:
    """Largest ``T`` in ``[0, t_max]`` with ``beta1(T) / gamma <= 1/2``.

    ``beta1`` is non-decreasing in ``T``, so the admissible set is an
    interval starting at 0 and bisection finds its end. Returns ``None``
    when even ``T = 0`` violates the condition.
    """
    def ok(t):
        return beta1(t, inp) / inp.gamma <= 0.5

    if not ok(0.0):
        return None
    if ok(t_max):
        return t_max
    lo, hi = 0.0, t_max
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


def stability_table(gammas, inp: StabilityInputs) -> list[StabilityRow]:
    gammas = list(gammas)
    if not gammas:
        raise InputError("need at least one gamma")
    rows = []
    for g in gammas:
        ts = t_star(inp.with_gamma(g))
        rows.append(StabilityRow(g, ts, stability_constant(ts, g, inp.alpha0)))
    return rows
