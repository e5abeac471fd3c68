"""Tangent cones of TV balls: membership, projection, Gaussian width, witness.

The tangent cone of the TV ball at a matrix theta* is the set of directions
theta with sum_{inactive edges} |grad| <= -sum_{active edges} sign * grad,
where the active edges are those where theta* has a nonzero gradient.  The
projection onto this cone is computed by bisecting a multiplier on that single
convex constraint; for a fixed multiplier the inner problem is a weighted
anisotropic TV proximal step on shifted data, reusing the solver module.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import EdgeIndex, HORIZONTAL, VERTICAL, as_matrix, hdiff, tv, vdiff
from .solver import ConvergenceError, SolverConfig, _adjoint, weighted_tv_prox

#: slack below -MEMBER_RTOL * max(1, tv) is treated as outside the cone
MEMBER_RTOL = 1e-9


@dataclass(frozen=True)
class SignPattern:
    """Active-edge set and gradient signs of a base matrix theta*."""

    base: np.ndarray
    sh: np.ndarray  # m x (n-1) signs of horizontal gradients, 0 when inactive
    sv: np.ndarray  # (m-1) x n signs of vertical gradients, 0 when inactive

    @property
    def shape(self):
        return self.base.shape

    def active_edges(self):
        """List of (EdgeIndex, sign) pairs in canonical edge order."""
        out = []
        for i, j in zip(*np.nonzero(self.sh)):
            out.append((EdgeIndex(HORIZONTAL, int(i), int(j)), int(self.sh[i, j])))
        for i, j in zip(*np.nonzero(self.sv)):
            out.append((EdgeIndex(VERTICAL, int(i), int(j)), int(self.sv[i, j])))
        return out


@dataclass
class WidthEstimate:
    mean: float
    std_error: float
    samples: int


def sign_pattern(theta_star, edge_tol=None):
    """Classify every edge of theta_star as active (with its sign) or zero."""
    theta_star = as_matrix(theta_star)
    if edge_tol is None:
        edge_tol = 1e-9 * max(1.0, float(np.abs(theta_star).max()))
    dh, dv = hdiff(theta_star), vdiff(theta_star)
    sh = np.where(np.abs(dh) > edge_tol, np.sign(dh), 0.0)
    sv = np.where(np.abs(dv) > edge_tol, np.sign(dv), 0.0)
    return SignPattern(base=theta_star.copy(), sh=sh, sv=sv)


def _constraint_value(sp, theta):
    """h(theta) = sum_{A^c} |grad| + sum_A sign * grad; membership is h <= 0."""
    dh, dv = hdiff(theta), vdiff(theta)
    inactive = np.abs(dh[sp.sh == 0]).sum() + np.abs(dv[sp.sv == 0]).sum()
    active = (sp.sh * dh).sum() + (sp.sv * dv).sum()
    return float(inactive + active)


def cone_membership(sp, theta):
    """Return (member, slack); slack is how far inside the cone theta sits."""
    theta = as_matrix(theta)
    if theta.shape != sp.shape:
        raise ValueError(f"shape {theta.shape} does not match pattern {sp.shape}")
    slack = -_constraint_value(sp, theta)
    scale = max(1.0, tv(theta))
    return slack >= -MEMBER_RTOL * scale, slack


def project_onto_cone(sp, Z, cfg=SolverConfig()):
    """Euclidean projection of Z onto the tangent cone described by sp.

    Bisects a multiplier mu >= 0 on the constraint h(theta) <= 0; for fixed mu
    the linear active-edge term is absorbed into a shifted data matrix and the
    inner problem is a weighted TV proximal step over the inactive edges.
    """
    Z = as_matrix(Z)
    if Z.shape != sp.shape:
        raise ValueError(f"shape {Z.shape} does not match pattern {sp.shape}")
    if _constraint_value(sp, Z) <= 0:
        return Z.copy()
    tol = 1e-6 * Z.size
    shift = _adjoint(sp.sh, sp.sv, np.empty_like(Z))
    wh_mask = (sp.sh == 0).astype(float)
    wv_mask = (sp.sv == 0).astype(float)
    state = None

    def solve(mu):
        nonlocal state
        theta, state, _, _ = weighted_tv_prox(
            Z - mu * shift, mu * wh_mask, mu * wv_mask, cfg, state=state
        )
        return theta, _constraint_value(sp, theta)

    lo, hi = 0.0, 1.0
    theta, h = solve(hi)
    doublings = 0
    while h > tol:
        lo, hi = hi, hi * 2.0
        theta, h = solve(hi)
        doublings += 1
        if doublings > cfg.max_bisect:
            return _grid_sweep(sp, Z, cfg, lo, hi, tol, solve)
    if h >= -tol:
        return theta
    for _ in range(cfg.max_bisect):
        mid = 0.5 * (lo + hi)
        theta, h = solve(mid)
        if -tol <= h <= tol:
            return theta
        if h > 0:
            lo = mid
        else:
            hi = mid
    return _grid_sweep(sp, Z, cfg, lo, hi, tol, solve)


def _grid_sweep(sp, Z, cfg, lo, hi, tol, solve):
    """Fallback when bisection brackets fail: monotone sweep over multipliers."""
    best = None
    for mu in np.geomspace(max(lo, 1e-8), max(hi, 1.0), 200):
        theta, h = solve(float(mu))
        if best is None or abs(h) < best[1]:
            best = (theta, abs(h))
        if -tol <= h <= tol:
            return theta
    raise ConvergenceError(
        "cone projection multiplier sweep did not meet the constraint tolerance",
        best[0] if best else None,
    )


def gaussian_width_cone(sp, samples, seed, cfg=SolverConfig()):
    """Monte Carlo estimate of the Gaussian width of the cone cap B(1).

    Averages ||Pi_cone(Z_k)|| over independent standard normal matrices drawn
    from per-sample seed streams, reduced in sample order so the result does
    not depend on scheduling.  More than 1% projection failures is an error.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    norms = []
    failures = 0
    for k in range(samples):
        rng = np.random.default_rng([seed, k])
        Z = rng.standard_normal(sp.shape)
        try:
            norms.append(float(np.linalg.norm(project_onto_cone(sp, Z, cfg))))
        except ConvergenceError:
            failures += 1
    if failures > 0.01 * samples:
        raise ConvergenceError(
            f"{failures} of {samples} cone projections failed to converge"
        )
    norms = np.asarray(norms)
    return WidthEstimate(
        mean=float(norms.mean()),
        std_error=float(norms.std(ddof=1) / math.sqrt(len(norms))),
        samples=len(norms),
    )


#: default slope of the witness construction; maximizes min{c1, sqrt(1-c1^2)}
DEFAULT_C1 = 1.0 / math.sqrt(2.0)


def lower_bound_witness(Z, c1=DEFAULT_C1):
    """Explicit unit-norm member of the two-halves tangent cone adapted to Z.

    The first n/2 - 1 columns are c1/n, the last n/2 columns are zero, and the
    middle column is constant on sqrt(n)-sized row blocks: c2/sqrt(n) where
    the block sum of Z's middle column is positive, c1/n otherwise, with
    c2 = min(c1, sqrt(1 - c1^2)).
    """
    Z = as_matrix(Z)
    m, n = Z.shape
    root = math.isqrt(n)
    if m != n or n % 2 != 0 or root * root != n:
        raise ValueError("witness needs a square n x n input with n even and a perfect square")
    if not 0.0 < c1 < 1.0:
        raise ValueError("c1 must lie strictly between 0 and 1")
    c2 = min(c1, math.sqrt(1.0 - c1 * c1))
    nu = np.zeros((n, n))
    nu[:, : n // 2 - 1] = c1 / n
    mid = n // 2 - 1
    block_sums = Z[:, mid].reshape(root, root).sum(axis=1)
    col = np.where(block_sums > 0, c2 / math.sqrt(n), c1 / n)
    nu[:, mid] = np.repeat(col, root)
    return nu
