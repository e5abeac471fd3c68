"""Command-line interface for the 2-D TV denoising toolkit.

One binary with subcommands; matrices travel as plain CSV (no header),
experiment reports as CSV with a JSON sidecar, partitions as JSON.  The
``--v`` and ``--lambda`` flags are in the normalized convention (tv/n for
square matrices) and are converted internally to the unnormalized tv used by
the solvers.  Exit codes: 0 success, 1 argument/input error, 2 solver
non-convergence.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .core import load_matrix_csv, make_signal, save_matrix_csv, tv
from .experiments import ExperimentSpec, run_experiment, write_report
from .geometry import gaussian_width_cone, lower_bound_witness, sign_pattern
from .partition import greedy_tv_partition
from .solver import ConvergenceError, SolverConfig, denoise_penalized, project_tv_ball
from .tuning_free import denoise_notuning


class _Parser(argparse.ArgumentParser):
    # argument errors must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x):
    return f"{x:.17g}"


def _load(path):
    if not os.path.exists(path):
        raise ValueError(f"input file not found: {path}")
    return load_matrix_csv(path)


def _build_parser():
    parser = _Parser(prog="tvgrid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="constrained or penalized TV denoising")
    p.add_argument("--input", required=True, help="input matrix CSV")
    p.add_argument("--mode", required=True, choices=["constrained", "penalized"])
    p.add_argument("--v", type=float, default=None,
                   help="normalized TV budget tv_norm (constrained mode)")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="normalized penalty multiplying tv_norm (penalized mode)")
    p.add_argument("--out", required=True, help="output matrix CSV")

    p = sub.add_parser("tune-free", help="fully data-driven denoising")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--json", dest="json_out", default=None,
                   help="optional JSON report path")

    p = sub.add_parser("simulate", help="Monte Carlo MSE scaling experiment")
    p.add_argument("--signal", required=True, choices=["two", "four", "worst"])
    p.add_argument("--n-list", required=True,
                   help="comma-separated ascending side lengths, e.g. 64,96,128")
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--estimator", choices=["ideal", "notuning"], default="ideal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.add_argument("--out", required=True, help="report CSV path (sidecar: .json)")

    p = sub.add_parser("partition", help="greedy quadtree TV partition")
    p.add_argument("--input", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--out", required=True, help="partition JSON path")

    p = sub.add_parser("gwidth", help="Monte Carlo Gaussian width of a tangent cone")
    p.add_argument("--signal", required=True, choices=["two", "four", "worst"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="accepted for symmetry; "
                   "estimation is deterministic regardless")

    p = sub.add_parser("witness", help="Monte Carlo check of the width lower-bound witness")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_denoise(args, cfg):
    y = _load(args.input)
    m, n = y.shape
    if m != n:
        raise ValueError("denoise needs a square matrix for the normalized convention")
    if args.mode == "penalized":
        if args.lam is None:
            raise ValueError("penalized mode requires --lambda")
        result = denoise_penalized(y, args.lam / n, cfg)
    else:
        if args.v is None:
            raise ValueError("constrained mode requires --v")
        result = project_tv_ball(y, args.v * n, cfg)
    save_matrix_csv(args.out, result.estimate)
    print(f"achieved_tv={_fmt(result.achieved_tv)} "
          f"residual_norm2={_fmt(result.residual_norm2)} "
          f"iterations={result.iterations} converged={result.converged}")
    return 0


def _cmd_tune_free(args, cfg):
    y = _load(args.input)
    result = denoise_notuning(y, cfg)
    save_matrix_csv(args.out, result.estimate)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(
                {
                    "sigma_hat": result.sigma_hat,
                    "radius2": result.radius2,
                    "on_boundary": result.on_boundary,
                    "centered_solution_tv": result.centered_solution_tv,
                },
                fh,
                indent=2,
            )
            fh.write("\n")
    print(f"sigma_hat={_fmt(result.sigma_hat)} on_boundary={result.on_boundary}")
    return 0


def _cmd_simulate(args, cfg):
    try:
        n_list = tuple(int(tok) for tok in args.n_list.split(","))
    except ValueError:
        raise ValueError(f"could not parse --n-list {args.n_list!r}")
    estimator = "ideal_constrained" if args.estimator == "ideal" else "notuning"
    spec = ExperimentSpec(
        signal=args.signal,
        n_list=n_list,
        reps=args.reps,
        sigma=args.sigma,
        estimator=estimator,
        seed=args.seed,
    )
    report = run_experiment(spec, cfg, threads=args.threads)
    write_report(report, args.out)
    print(f"slope={_fmt(report.slope)} intercept={_fmt(report.intercept)} "
          f"slope_stderr={_fmt(report.slope_stderr)}")
    return 0


def _cmd_partition(args, cfg):
    theta = _load(args.input)
    P = greedy_tv_partition(theta, args.epsilon)
    with open(args.out, "w") as fh:
        fh.write(P.to_json() + "\n")
    print(f"blocks={len(P)}")
    return 0


def _cmd_gwidth(args, cfg):
    sp = sign_pattern(make_signal(args.signal, args.n))
    est = gaussian_width_cone(sp, args.samples, args.seed, cfg)
    print(f"mean={_fmt(est.mean)} std_error={_fmt(est.std_error)} "
          f"samples={est.samples}")
    return 0


def _cmd_witness(args, cfg):
    rng_values = []
    for k in range(args.samples):
        rng = np.random.default_rng([args.seed, k])
        Z = rng.standard_normal((args.n, args.n))
        nu = lower_bound_witness(Z)
        rng_values.append(float(np.sum(nu * Z)))
    vals = np.asarray(rng_values)
    stderr = vals.std(ddof=1) / math.sqrt(args.samples) if args.samples > 1 else 0.0
    print(f"mean={_fmt(vals.mean())} std_error={_fmt(stderr)} samples={args.samples}")
    return 0


_COMMANDS = {
    "denoise": _cmd_denoise,
    "tune-free": _cmd_tune_free,
    "simulate": _cmd_simulate,
    "partition": _cmd_partition,
    "gwidth": _cmd_gwidth,
    "witness": _cmd_witness,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    cfg = SolverConfig()
    try:
        return _COMMANDS[args.command](args, cfg)
    except ConvergenceError as exc:
        print(f"tvgrid: solver did not converge: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"tvgrid: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
