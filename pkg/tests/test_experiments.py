import numpy as np
import pytest

from tvgrid.experiments import (
    ExperimentSpec,
    fit_loglog_slope,
    rep_seed,
    run_experiment,
    sidecar_path,
)
from tvgrid.solver import SolverConfig

FAST = SolverConfig(max_iters=3000, rel_tol=1e-6, bisect_tol=1e-3)


def test_spec_validation():
    good = dict(signal="two", n_list=(4, 8), reps=2, sigma=1.0,
                estimator="ideal_constrained", seed=0)
    ExperimentSpec(**good)
    with pytest.raises(ValueError):
        ExperimentSpec(**{**good, "n_list": (8, 4)})
    with pytest.raises(ValueError):
        ExperimentSpec(**{**good, "n_list": (4, 7)})  # odd n for "two"
    with pytest.raises(ValueError):
        ExperimentSpec(**{**good, "reps": 1})
    with pytest.raises(ValueError):
        ExperimentSpec(**{**good, "sigma": 0.0})
    with pytest.raises(ValueError):
        ExperimentSpec(**{**good, "estimator": "oracle"})


def test_rep_seed_distinct_and_stable():
    seeds = {rep_seed(0, n, rep) for n in (8, 16) for rep in range(100)}
    assert len(seeds) == 200
    assert rep_seed(0, 8, 0) == rep_seed(0, 8, 0)
    assert rep_seed(0, 8, 0) != rep_seed(1, 8, 0)


def test_fit_loglog_slope_exact_power_law():
    # mse = 3 * N^{-1/2} is recovered exactly
    points = [(N, 3.0 * N**-0.5) for N in (16, 64, 256, 1024)]
    slope, intercept, stderr = fit_loglog_slope(points)
    assert slope == pytest.approx(-0.5, abs=1e-12)
    assert intercept == pytest.approx(np.log(3.0), abs=1e-12)
    assert stderr == pytest.approx(0.0, abs=1e-12)


def test_fit_loglog_slope_two_points_zero_stderr():
    slope, _, stderr = fit_loglog_slope([(4, 2.0), (16, 1.0)])
    assert slope == pytest.approx(np.log(0.5) / np.log(4))
    assert stderr == 0.0


def test_fit_loglog_slope_matches_polyfit():
    rng = np.random.default_rng(0)
    points = [(N, float(np.exp(-0.4 * np.log(N) + rng.normal(0, 0.1))))
              for N in (16, 64, 256, 1024, 4096)]
    slope, intercept, _ = fit_loglog_slope(points)
    ref = np.polyfit(np.log([p[0] for p in points]),
                     np.log([p[1] for p in points]), 1)
    assert slope == pytest.approx(ref[0], abs=1e-10)
    assert intercept == pytest.approx(ref[1], abs=1e-10)


def test_fit_loglog_slope_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_loglog_slope([(4, 1.0)])
    with pytest.raises(ValueError):
        fit_loglog_slope([(4, 1.0), (8, -1.0)])
    with pytest.raises(ValueError):
        fit_loglog_slope([(4, 1.0), (4, 2.0)])


def test_run_experiment_thread_count_invariance():
    spec = ExperimentSpec(signal="two", n_list=(8, 12), reps=3, sigma=0.5,
                          estimator="ideal_constrained", seed=3)
    serial = run_experiment(spec, FAST, threads=1)
    parallel = run_experiment(spec, FAST, threads=4)
    assert serial.records == parallel.records
    assert serial.slope == parallel.slope


def test_run_experiment_near_noiseless_recovery():
    spec = ExperimentSpec(signal="two", n_list=(8, 12), reps=2, sigma=1e-6,
                          estimator="ideal_constrained", seed=0)
    report = run_experiment(spec, SolverConfig(rel_tol=1e-9))
    for r in report.records:
        assert r["mse_mean"] <= 1e-8


def test_run_experiment_mse_grows_with_noise():
    base = dict(signal="two", n_list=(8, 12), reps=4,
                estimator="ideal_constrained", seed=1)
    lo = run_experiment(ExperimentSpec(sigma=0.1, **base), FAST)
    hi = run_experiment(ExperimentSpec(sigma=1.0, **base), FAST)
    for a, b in zip(lo.records, hi.records):
        assert b["mse_mean"] > a["mse_mean"]


def test_run_experiment_notuning_estimator():
    spec = ExperimentSpec(signal="two", n_list=(8, 12), reps=3, sigma=1.0,
                          estimator="notuning", seed=2)
    report = run_experiment(spec, FAST)
    assert all(np.isfinite(r["mse_mean"]) and r["mse_mean"] > 0
               for r in report.records)
    assert report.spec is spec


def test_sidecar_path():
    assert sidecar_path("out/run.csv") == "out/run.json"
    assert sidecar_path("report") == "report.json"
