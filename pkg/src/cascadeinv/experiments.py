"""End-to-end reconstruction experiments and their file output.

A run synthesizes exact final-time data from a known coefficient, perturbs
it with seeded noise, reconstructs the coefficient with the conjugate
gradient method and writes plot-ready CSV files plus a key-value summary.
All numbers are written with 17 significant digits so repeated runs with
the same configuration are byte-identical.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .cgm import Method, OptimizerConfig, ReconstructionResult, run
from .direct import CoefficientField, solve_direct
from .errors import InputError
from .grid import Grid1D, l2_norm, nodal_sum_sq, simpson_integrate
from .noise import add_noise
from .stability import REFERENCE_INPUTS, TABLE_GAMMAS, StabilityInputs, stability_table

__all__ = [
    "Example",
    "DataNorm",
    "ExperimentConfig",
    "RunOutcome",
    "builtin_coefficient",
    "builtin_initial_data",
    "load_node_values",
    "recomputed_stability_inputs",
    "run_experiment",
    "emit_stability_tables",
    "OUTPUT_ENV_VAR",
    "default_output_dir",
]

log = logging.getLogger(__name__)

OUTPUT_ENV_VAR = "CASCADEINV_OUTPUT_DIR"
_FALLBACK_OUTPUT = "cascadeinv-output"


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV_VAR) or _FALLBACK_OUTPUT)


class Example(str, Enum):
    EXAMPLE1 = "1"
    EXAMPLE2 = "2"
    CUSTOM = "custom"


class DataNorm(str, Enum):
    """Scale of the data misfit.

    ``discrete`` multiplies the quadrature norm by N, which puts J and the
    noise energy on the scale of plain nodal sums; ``quadrature`` uses the
    integral norm as is.
    """

    DISCRETE = "discrete"
    QUADRATURE = "quadrature"


@dataclass
class ExperimentConfig:
    example: Example = Example.EXAMPLE1
    n_cells: int = 100
    t_final: float = 1.0
    gamma: float = 1e-6
    noise_p: list[float] = field(default_factory=lambda: [0.01, 0.03, 0.05])
    methods: list[Method] = field(default_factory=lambda: [Method.FLETCHER_REEVES, Method.POLAK_RIBIERE])
    seed: int = 1234
    rho: float = 1.01
    max_iterations: int = 500
    initial_guess: float | str = 0.3
    output_dir: Path | None = None
    data_norm: DataNorm = DataNorm.DISCRETE
    d_file: str | None = None
    u0_file: str | None = None
    v0_file: str | None = None

    def __post_init__(self):
        self.example = Example(self.example)
        self.data_norm = DataNorm(self.data_norm)
        self.methods = [Method(m) for m in self.methods]
        if self.n_cells < 4:
            raise InputError("n_cells must be at least 4")
        if not self.t_final > 0:
            raise InputError("t_final must be positive")
        if not self.gamma > 0:
            raise InputError("gamma must be positive")
        if not self.rho > 1:
            raise InputError("rho must exceed 1")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be at least 1")
        if not self.noise_p or any(not p >= 0 for p in self.noise_p):
            raise InputError("noise levels must be non-negative and non-empty")
        if not self.methods:
            raise InputError("at least one method is required")
        if self.example is Example.CUSTOM and self.d_file is None:
            raise InputError("a custom example needs a coefficient file")

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.n_cells, self.t_final)

    @property
    def data_weight(self) -> float:
        return float(self.n_cells) if self.data_norm is DataNorm.DISCRETE else 1.0

    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir) if self.output_dir is not None else default_output_dir()


def builtin_coefficient(example, grid: Grid1D) -> CoefficientField:
    example = Example(example)
    x = grid.x
    if example is Example.EXAMPLE1:
        return CoefficientField(x * (1.0 - x))
    if example is Example.EXAMPLE2:
        d = np.full_like(x, 0.1)
        d[(x > 0.05) & (x <= 0.45)] = 0.5
        right = x >= 0.5
        d[right] = 0.1 + 0.5 * np.sin(2.0 * np.pi * x[right]) ** 2
        return CoefficientField(d)
    raise InputError("custom problems read the coefficient from a file")


def builtin_initial_data(example, grid: Grid1D) -> tuple[np.ndarray, np.ndarray]:
    example = Example(example)
    x = grid.x
    if example is Example.EXAMPLE1:
        v0 = np.exp(-x) * np.sin(np.pi * x)
    elif example is Example.EXAMPLE2:
        v0 = np.sin(np.pi * x)
    else:
        raise InputError("custom problems read the initial data from files")
    v0[[0, -1]] = 0.0
    return np.zeros_like(x), v0


def load_node_values(path, grid: Grid1D) -> np.ndarray:
    """Read a two-column ``x,value`` file whose x column matches the grid.

    Lines starting with ``#`` and a non-numeric header line are skipped;
    commas or whitespace may separate the columns.
    """
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.replace(",", " ").split()
            try:
                vals = [float(p) for p in parts]
            except ValueError:
                if rows:
                    raise InputError(f"{path}:{lineno}: not a number") from None
                continue
            if len(vals) != 2:
                raise InputError(f"{path}:{lineno}: expected two columns, got {len(vals)}")
            rows.append(vals)
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    if arr.shape[0] != grid.n_nodes:
        raise InputError(f"{path}: {arr.shape[0]} rows for a grid of {grid.n_nodes} nodes")
    if not np.allclose(arr[:, 0], grid.x, rtol=0.0, atol=1e-9):
        raise InputError(f"{path}: x column does not match the grid nodes")
    return arr[:, 1].copy()


def _problem(cfg: ExperimentConfig):
    grid = cfg.grid
    if cfg.example is Example.CUSTOM:
        d_true = CoefficientField(load_node_values(cfg.d_file, grid))
        u0 = load_node_values(cfg.u0_file, grid) if cfg.u0_file else np.zeros(grid.n_nodes)
        if cfg.v0_file is None:
            raise InputError("a custom example needs an initial v file")
        v0 = load_node_values(cfg.v0_file, grid)
    else:
        d_true = builtin_coefficient(cfg.example, grid)
        u0, v0 = builtin_initial_data(cfg.example, grid)
    return grid, d_true, u0, v0


def _initial_guess(cfg: ExperimentConfig, grid: Grid1D):
    guess = cfg.initial_guess
    if isinstance(guess, (int, float)):
        return float(guess)
    kind, _, value = str(guess).partition(":")
    if kind == "const":
        try:
            return float(value)
        except ValueError:
            raise InputError(f"bad constant initial guess {guess!r}") from None
    if kind == "file":
        return load_node_values(value, grid)
    raise InputError(f"initial guess must be const:<v> or file:<path>, got {guess!r}")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_csv(path: Path, header: list[str], columns) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_summary(path: Path, items: dict) -> None:
    out = []
    for k, v in items.items():
        out.append(f"{k} = {_fmt(v) if isinstance(v, float) else v}")
    path.write_text("\n".join(out) + "\n", encoding="utf-8", newline="\n")


@dataclass
class RunOutcome:
    noise_p: float
    method: Method
    result: ReconstructionResult
    initial_error: float
    directory: Path


def run_tag(example: Example, p: float, method: Method) -> str:
    return f"example{example.value}_p{p:g}_{method.value}"


def run_experiment(cfg: ExperimentConfig) -> list[RunOutcome]:
    """Run every (noise level, method) pair and write one folder per run."""
    grid, d_true, u0, v0 = _problem(cfg)
    d0 = _initial_guess(cfg, grid)
    out_root = cfg.resolved_output_dir()
    out_root.mkdir(parents=True, exist_ok=True)
    exact = solve_direct(grid, d_true, u0, v0)
    w = cfg.data_weight

    outcomes = []
    for p in cfg.noise_p:
        m = add_noise(exact.u[-1], exact.v[-1], p, cfg.seed, grid, data_weight=w)
        for method in cfg.methods:
            opt = OptimizerConfig(method=method, gamma=cfg.gamma, rho=cfg.rho,
                                  max_iterations=cfg.max_iterations, initial_guess=d0,
                                  data_weight=w)
            log.info("running %s with %g%% noise", method.value, 100 * p)
            res = run(opt, m, grid, u0, v0, d_true=d_true)
            err0 = l2_norm(d_true.values - opt.initial_values(grid), grid)
            folder = out_root / run_tag(cfg.example, p, method)
            folder.mkdir(parents=True, exist_ok=True)
            _write_csv(folder / "reconstruction.csv", ["x", "d_true", "d_recon"],
                       [grid.x, d_true.values, res.d_final.values])
            hist = res.history
            _write_csv(folder / "history.csv", ["n", "J", "beta", "mu", "error"],
                       [[str(h.n) for h in hist], [h.j_value for h in hist], [h.beta for h in hist],
                        [h.mu for h in hist], [h.error for h in hist]])
            _write_summary(folder / "summary.txt", {
                "example": cfg.example.value,
                "method": method.value,
                "noise_p": float(p),
                "seed": cfg.seed,
                "n_cells": cfg.n_cells,
                "t_final": float(cfg.t_final),
                "gamma": float(cfg.gamma),
                "rho": float(cfg.rho),
                "data_norm": cfg.data_norm.value,
                "epsilon": float(res.epsilon_used),
                "stop_reason": res.stop_reason.value,
                "iterations": res.iterations,
                "final_j": float(res.final_j),
                "initial_error": float(err0),
                "final_error": float(hist[-1].error),
            })
            outcomes.append(RunOutcome(p, method, res, err0, folder))
    return outcomes


def recomputed_stability_inputs(example, n_cells: int = 100, t_final: float = 1.0) -> StabilityInputs:
    """Norm inputs measured from the solver instead of the reference values.

    Initial-data norms are quadrature integrals; final-state norms are plain
    nodal sums, the convention the reference values follow.
    """
    grid = Grid1D(n_cells, t_final)
    d = builtin_coefficient(example, grid)
    u0, v0 = builtin_initial_data(example, grid)
    traj = solve_direct(grid, d, u0, v0)
    ref = REFERENCE_INPUTS[int(Example(example).value)]
    return StabilityInputs(ref.gamma, ref.alpha0, simpson_integrate(u0**2, grid),
                           simpson_integrate(v0**2, grid), nodal_sum_sq(traj.u[-1]),
                           nodal_sum_sq(traj.v[-1]))


def emit_stability_tables(cfg: ExperimentConfig, gammas=TABLE_GAMMAS) -> list[Path]:
    """Write the (gamma, T*, L) tables from reference and recomputed norms."""
    if cfg.example is Example.CUSTOM:
        raise InputError("stability tables exist only for the built-in examples")
    out_root = cfg.resolved_output_dir()
    out_root.mkdir(parents=True, exist_ok=True)
    sources = {
        "reference": REFERENCE_INPUTS[int(cfg.example.value)],
        "recomputed": recomputed_stability_inputs(cfg.example, cfg.n_cells, cfg.t_final),
    }
    paths = []
    for name, inp in sources.items():
        rows = stability_table(gammas, inp)
        path = out_root / f"stability_example{cfg.example.value}_{name}.csv"
        _write_csv(path, ["gamma", "t_star", "L"],
                   [[r.gamma for r in rows], [r.t_star for r in rows], [r.constant for r in rows]])
        paths.append(path)
    return paths
