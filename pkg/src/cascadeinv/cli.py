"""Command-line entry point: ``cascadeinv`` or ``python -m cascadeinv``."""
from __future__ import annotations

import argparse
import logging
import sys

from .cgm import Method
from .errors import CascadeError, InputError
from .experiments import OUTPUT_ENV_VAR, DataNorm, Example, ExperimentConfig, emit_stability_tables, run_experiment

_METHODS = {"fr": [Method.FLETCHER_REEVES], "pr": [Method.POLAK_RIBIERE],
            "both": [Method.FLETCHER_REEVES, Method.POLAK_RIBIERE]}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cascadeinv",
        description="Reconstruct the diffusion coefficient of a plate/heat cascade from noisy final-time data.",
        epilog=f"Output goes to --out, else ${OUTPUT_ENV_VAR}, else ./cascadeinv-output.",
    )
    p.add_argument("--example", choices=["1", "2", "custom"], default="1")
    p.add_argument("--n", type=int, default=100, help="number of grid cells (default 100)")
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1e-6, help="regularization parameter")
    p.add_argument("--noise", type=float, action="append",
                   help="noise fraction, repeatable (default 0.01 0.03 0.05)")
    p.add_argument("--method", choices=sorted(_METHODS), default="both")
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--rho", type=float, default=1.01, help="discrepancy factor")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--init", default="const:0.3", help="const:<value> or file:<path>")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--data-norm", choices=[d.value for d in DataNorm], default="discrete",
                   help="misfit scale: nodal-sum (discrete) or integral (quadrature)")
    p.add_argument("--d-file", help="custom example: x,d node file")
    p.add_argument("--u0-file", help="custom example: x,u0 node file (default zero)")
    p.add_argument("--v0-file", help="custom example: x,v0 node file")
    p.add_argument("--stability-tables", action="store_true",
                   help="write the (gamma, T*, L) tables instead of reconstructing")
    p.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.quiet:
        logging.getLogger("cascadeinv").setLevel(logging.ERROR)
    try:
        cfg = ExperimentConfig(
            example=Example(args.example), n_cells=args.n, t_final=args.t_final, gamma=args.gamma,
            noise_p=args.noise if args.noise else [0.01, 0.03, 0.05], methods=_METHODS[args.method],
            seed=args.seed, rho=args.rho, max_iterations=args.max_iters, initial_guess=args.init,
            output_dir=args.out, data_norm=DataNorm(args.data_norm), d_file=args.d_file,
            u0_file=args.u0_file, v0_file=args.v0_file,
        )
    except InputError as exc:
        parser.error(str(exc))

    try:
        if args.stability_tables:
            for path in emit_stability_tables(cfg):
                if not args.quiet:
                    print(path)
            return 0
        outcomes = run_experiment(cfg)
    except (CascadeError, ValueError, ArithmeticError, OSError) as exc:
        print(f"cascadeinv: error: {exc}", file=sys.stderr)
        return 1

    if not args.quiet:
        for o in outcomes:
            r = o.result
            print(f"p={o.noise_p:g} {o.method.value}: {r.stop_reason.value} after {r.iterations} "
                  f"iterations, J={r.final_j:.4e}, eps={r.epsilon_used:.4e}, "
                  f"error {o.initial_error:.4f} -> {r.history[-1].error:.4f}  [{o.directory}]")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
