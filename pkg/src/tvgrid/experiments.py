"""Monte Carlo MSE scaling experiments and log-log slope fitting.

Each (n, rep) cell draws y = theta* + sigma * Z from its own seed stream,
derived from the experiment seed with a fixed 64-bit mixing function, so runs
are reproducible and independent of how replications are scheduled.  Results
are reduced in (n, rep) order, making reports bit-identical for any thread
count.
"""

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import make_signal, tv
from .solver import SolverConfig, project_tv_ball
from .tuning_free import denoise_notuning

ESTIMATORS = ("ideal_constrained", "notuning")

_MASK = (1 << 64) - 1


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def rep_seed(seed, n, rep):
    """Seed for one (n, rep) cell: splitmix64 of the mixed experiment seed."""
    return _splitmix64((seed & _MASK) ^ _splitmix64(((n & 0xFFFFFFFF) << 32) | (rep & 0xFFFFFFFF)))


@dataclass(frozen=True)
class ExperimentSpec:
    signal: str
    n_list: tuple
    reps: int
    sigma: float
    estimator: str
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if not self.n_list or any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("n_list must be strictly ascending and nonempty")
        if self.signal in ("two", "four") and any(n % 2 for n in self.n_list):
            raise ValueError(f"signal {self.signal!r} requires even n")
        if self.reps < 2:
            raise ValueError("need at least 2 repetitions")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")


@dataclass
class ExperimentReport:
    records: list  # per-n dicts: {n, N, mse_mean, mse_stderr}
    slope: float
    intercept: float
    slope_stderr: float
    spec: ExperimentSpec = field(default=None)


def _run_cell(args):
    signal, n, rep, sigma, estimator, seed, cfg = args
    theta_star = make_signal(signal, n)
    rng = np.random.default_rng(rep_seed(seed, n, rep))
    y = theta_star + sigma * rng.standard_normal((n, n))
    try:
        if estimator == "ideal_constrained":
            estimate = project_tv_ball(y, tv(theta_star), cfg).estimate
        else:
            estimate = denoise_notuning(y, cfg).estimate
    except Exception as exc:
        raise RuntimeError(f"solve failed at (n={n}, rep={rep}): {exc}") from exc
    return float(np.sum((estimate - theta_star) ** 2)) / (n * n)


def run_experiment(spec, cfg=SolverConfig(), threads=1):
    """Estimate the MSE for every n in the spec and fit a log-log slope."""
    tasks = [
        (spec.signal, n, rep, spec.sigma, spec.estimator, spec.seed, cfg)
        for n in spec.n_list
        for rep in range(spec.reps)
    ]
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            mses = list(pool.map(_run_cell, tasks, chunksize=1))
    else:
        mses = [_run_cell(t) for t in tasks]
    records = []
    for idx, n in enumerate(spec.n_list):
        cell = np.asarray(mses[idx * spec.reps: (idx + 1) * spec.reps])
        records.append(
            {
                "n": n,
                "N": n * n,
                "mse_mean": float(cell.mean()),
                "mse_stderr": float(cell.std(ddof=1) / math.sqrt(spec.reps)),
            }
        )
    slope, intercept, slope_stderr = fit_loglog_slope(
        [(r["N"], r["mse_mean"]) for r in records]
    )
    return ExperimentReport(
        records=records,
        slope=slope,
        intercept=intercept,
        slope_stderr=slope_stderr,
        spec=spec,
    )


def fit_loglog_slope(points):
    """Ordinary least squares of ln(mse) on ln(N).

    Returns (slope, intercept, slope_stderr); the standard error is zero for
    a two-point fit.
    """
    points = list(points)
    if len(points) < 2:
        raise ValueError("need at least 2 points to fit a slope")
    if any(N <= 0 or mse <= 0 for N, mse in points):
        raise ValueError("all N and mse values must be positive")
    x = np.log([p[0] for p in points])
    y = np.log([p[1] for p in points])
    k = len(points)
    xbar, ybar = x.mean(), y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0:
        raise ValueError("N values must not all coincide")
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    intercept = float(ybar - slope * xbar)
    if k == 2:
        stderr = 0.0
    else:
        ssr = float(np.sum((y - intercept - slope * x) ** 2))
        stderr = math.sqrt(ssr / (k - 2) / sxx)
    return slope, intercept, stderr


CSV_HEADER = ["signal", "estimator", "n", "N", "mse_mean", "mse_stderr"]


def sidecar_path(csv_path):
    """JSON sidecar path for a report CSV: same name with a .json suffix."""
    path = str(csv_path)
    return (path[: -len(".csv")] if path.endswith(".csv") else path) + ".json"


def write_report(report, csv_path):
    """Write the per-n records as CSV plus the JSON sidecar with the fit."""
    spec = report.spec
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in report.records:
            writer.writerow(
                [
                    spec.signal,
                    spec.estimator,
                    r["n"],
                    r["N"],
                    f"{r['mse_mean']:.17g}",
                    f"{r['mse_stderr']:.17g}",
                ]
            )
    sidecar = {
        "slope": report.slope,
        "intercept": report.intercept,
        "slope_stderr": report.slope_stderr,
        "spec": {
            "signal": spec.signal,
            "n_list": list(spec.n_list),
            "reps": spec.reps,
            "sigma": spec.sigma,
            "estimator": spec.estimator,
        },
        "seed": spec.seed,
    }
    with open(sidecar_path(csv_path), "w") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
