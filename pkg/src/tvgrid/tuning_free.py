"""Fully data-driven TV denoising: noise-level estimate and Dantzig-form solve.

The noise level is estimated from the data's own total variation, calibrated
so that standard Gaussian noise gives the right answer in expectation (the TV
of an n x n standard normal matrix is a sum of 2n(n-1) half-normal terms with
mean 2/sqrt(pi) each).  The estimator itself finds the minimum-TV zero-mean
matrix inside a Euclidean ball of radius sqrt(n^2 - 1) * sigma_hat around the
centered data, then adds the data mean back.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import as_matrix, tv
from .solver import ConvergenceError, SolverConfig, _penalized

#: relative slack on ||w - w_hat||^2 == radius2 accepted as "on the boundary"
BOUNDARY_RTOL = 1e-3


@dataclass
class TuningFreeResult:
    estimate: np.ndarray
    sigma_hat: float
    radius2: float
    on_boundary: bool
    centered_solution_tv: float


def sigma_hat(y):
    """Noise-level estimate sqrt(pi) * tv(y) / (4 n (n-1)) for square y."""
    y = as_matrix(y)
    m, n = y.shape
    if m != n or n < 2:
        raise ValueError("sigma_hat requires a square matrix with n >= 2")
    return math.sqrt(math.pi) * tv(y) / (4.0 * n * (n - 1))


def denoise_notuning(y, cfg=SolverConfig()):
    """Tuning-free TVD estimator.

    Centers the data, and unless zero is already inside the data-driven ball,
    bisects the penalty of the penalized solver until the residual
    ||w - w_hat||^2 matches (n^2 - 1) * sigma_hat^2 within bisect_tol relative
    (the residual is nondecreasing in the penalty).
    """
    y = as_matrix(y)
    m, n = y.shape
    if m != n or n < 2:
        raise ValueError("denoise_notuning requires a square matrix with n >= 2")
    ybar = float(y.mean())
    w = y - ybar
    s = sigma_hat(y)
    r2 = (n * n - 1) * s * s
    if s == 0.0:
        # constant data: radius 0 forces w_hat = w (itself constant up to
        # rounding of the mean)
        return TuningFreeResult(
            estimate=y.copy(),
            sigma_hat=0.0,
            radius2=0.0,
            on_boundary=False,
            centered_solution_tv=tv(w),
        )
    w_norm2 = float(np.sum(w * w))
    if w_norm2 <= r2:
        return TuningFreeResult(
            estimate=np.full_like(y, ybar),
            sigma_hat=s,
            radius2=r2,
            on_boundary=False,
            centered_solution_tv=0.0,
        )

    state = None
    best = None

    def residual(lam, use_cfg=None):
        nonlocal state, best
        theta, state, _, _ = _penalized(w, lam, use_cfg or cfg, state=state)
        rho = float(np.sum((w - theta) ** 2))
        if best is None or abs(rho - r2) < abs(best[1] - r2):
            best = (theta, rho)
        return theta, rho

    def done(rho):
        return abs(rho - r2) <= cfg.bisect_tol * r2

    lo, hi = 0.0, 1.0
    w_hat, rho = residual(hi)
    doublings = 0
    while rho < r2:
        lo, hi = hi, hi * 2.0
        w_hat, rho = residual(hi)
        doublings += 1
        if doublings > cfg.max_bisect:
            raise ConvergenceError(
                "could not bracket the residual radius by doubling the penalty",
                best[0] + ybar,
            )
    tight = replace(cfg, rel_tol=cfg.rel_tol * 1e-3)
    for restart in range(3):
        steps = 0
        while not done(rho):
            if steps >= cfg.max_bisect or hi - lo <= 1e-9 * max(hi, 1.0):
                break
            mid = 0.5 * (lo + hi)
            w_hat, rho = residual(mid)
            if rho < r2:
                lo = mid
            else:
                hi = mid
            steps += 1
        if done(rho):
            break
        # same warm-start stall as in project_tv_ball: the penalty is pinned
        # but the inner solves quit early, so push them further at fixed lam
        mid = 0.5 * (lo + hi)
        for _ in range(5):
            w_hat, rho = residual(mid, use_cfg=tight)
            if done(rho):
                break
        if done(rho) or restart == 2:
            break
        # rebuild a bracket poisoned by earlier under-converged solves
        if rho < r2:
            lo, hi = mid, 2.0 * mid
            w_hat, rho = residual(hi)
            doublings = 0
            while rho < r2 and doublings <= cfg.max_bisect:
                lo, hi = hi, hi * 2.0
                w_hat, rho = residual(hi)
                doublings += 1
        else:
            lo, hi = 0.0, mid
    if not done(rho):
        raise ConvergenceError(
            f"residual bisection did not converge in {cfg.max_bisect} steps",
            best[0] + ybar,
        )
    return TuningFreeResult(
        estimate=w_hat + ybar,
        sigma_hat=s,
        radius2=r2,
        on_boundary=abs(rho - r2) <= BOUNDARY_RTOL * r2,
        centered_solution_tv=tv(w_hat),
    )
