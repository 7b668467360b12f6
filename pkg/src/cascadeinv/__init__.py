"""Identification of the diffusion coefficient in a plate/heat cascade.

The forward model couples a fourth-order plate equation for ``u`` with a
heat equation for ``v`` whose diffusion coefficient ``d(x)`` is unknown.
Given noisy final-time states, :func:`cascadeinv.cgm.run` recovers ``d`` by
minimizing a Tikhonov functional with a conjugate-gradient method whose
gradient comes from an adjoint problem.
"""
from .cgm import Method, OptimizerConfig, ReconstructionResult, StopReason, run
from .direct import CoefficientField, Trajectory, solve_direct
from .errors import (CascadeError, CoefficientError, DegenerateInputError, InputError,
                     ZeroDirectionError)
from .grid import Grid1D
from .noise import add_noise
from .objective import Measurement, evaluate

__all__ = [
    "Grid1D",
    "CoefficientField",
    "Trajectory",
    "Measurement",
    "Method",
    "OptimizerConfig",
    "ReconstructionResult",
    "StopReason",
    "solve_direct",
    "add_noise",
    "evaluate",
    "run",
    "CascadeError",
    "InputError",
    "CoefficientError",
    "DegenerateInputError",
    "ZeroDirectionError",
]

__version__ = "0.1.0"
