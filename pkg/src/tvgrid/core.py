"""Grid matrices, edge indexing and total-variation functionals.

A matrix is a dense 2-D numpy array of finite floats.  The grid graph on an
m x n matrix has one horizontal edge between (i, j) and (i, j+1) for every
j < n-1 and one vertical edge between (i, j) and (i+1, j) for every i < m-1.
The canonical edge order is: all horizontal edges in row-major order, then
all vertical edges in row-major order.  For an edge e the anchor vertex is
e- and the right (horizontal) or lower (vertical) neighbour is e+.
"""

from collections import namedtuple

import numpy as np

HORIZONTAL = "horizontal"
VERTICAL = "vertical"

#: orientation is "horizontal" or "vertical"; (i, j) is the anchor vertex e-.
EdgeIndex = namedtuple("EdgeIndex", ["orientation", "i", "j"])


def as_matrix(values):
    """Validate and return a 2-D float array with all entries finite."""
    theta = np.asarray(values, dtype=float)
    if theta.ndim != 2 or theta.shape[0] < 1 or theta.shape[1] < 1:
        raise ValueError("matrix must be 2-D with at least one row and column")
    if not np.all(np.isfinite(theta)):
        raise ValueError("matrix entries must be finite")
    return theta


def hdiff(theta):
    """Horizontal edge gradients theta[i, j+1] - theta[i, j], shape m x (n-1)."""
    return theta[:, 1:] - theta[:, :-1]


def vdiff(theta):
    """Vertical edge gradients theta[i+1, j] - theta[i, j], shape (m-1) x n."""
    return theta[1:, :] - theta[:-1, :]


def tv_rows(theta):
    """Total variation along rows (sum over horizontal edges)."""
    theta = as_matrix(theta)
    return float(np.abs(hdiff(theta)).sum())


def tv_cols(theta):
    """Total variation along columns (sum over vertical edges)."""
    theta = as_matrix(theta)
    return float(np.abs(vdiff(theta)).sum())


def tv(theta):
    """Unnormalized total variation: sum of |neighbour differences| over all edges."""
    theta = as_matrix(theta)
    return float(np.abs(hdiff(theta)).sum() + np.abs(vdiff(theta)).sum())


def tv_norm(theta):
    """Normalized total variation tv(theta)/n, defined for square matrices only."""
    theta = as_matrix(theta)
    m, n = theta.shape
    if m != n:
        raise ValueError("tv_norm is defined for square matrices only")
    return tv(theta) / n


def edge_count(m, n):
    """Number of grid edges of an m x n matrix: m(n-1) + n(m-1)."""
    return m * (n - 1) + n * (m - 1)


def edges(m, n):
    """Iterate all edges in canonical order (horizontal row-major, then vertical)."""
    for i in range(m):
        for j in range(n - 1):
            yield EdgeIndex(HORIZONTAL, i, j)
    for i in range(m - 1):
        for j in range(n):
            yield EdgeIndex(VERTICAL, i, j)


def edge_gradient(theta, e):
    """Edge gradient theta(e+) - theta(e-) for a single edge."""
    theta = as_matrix(theta)
    m, n = theta.shape
    if e.orientation == HORIZONTAL:
        if not (0 <= e.i < m and 0 <= e.j < n - 1):
            raise ValueError(f"horizontal edge {e} out of range for shape {(m, n)}")
        return float(theta[e.i, e.j + 1] - theta[e.i, e.j])
    if e.orientation == VERTICAL:
        if not (0 <= e.i < m - 1 and 0 <= e.j < n):
            raise ValueError(f"vertical edge {e} out of range for shape {(m, n)}")
        return float(theta[e.i + 1, e.j] - theta[e.i, e.j])
    raise ValueError(f"unknown edge orientation {e.orientation!r}")


SIGNAL_KINDS = ("two", "four", "worst", "custom")


def make_signal(kind, n, values=None):
    """Build one of the benchmark n x n signal matrices.

    two:   indicator of the right half, one unit jump per row.
    four:  four constant quadrants with values [[1, 2], [0, 1]].
    worst: indicator of {i + j > n} (1-based), a diagonal step.
    custom: returns ``values`` validated as an n x n matrix.

    ``two`` and ``four`` require even n.
    """
    if kind == "custom":
        theta = as_matrix(values)
        if theta.shape != (n, n):
            raise ValueError(f"custom signal must be {n} x {n}")
        return theta
    if kind not in SIGNAL_KINDS:
        raise ValueError(f"unknown signal kind {kind!r}")
    if n < 2:
        raise ValueError("signal side length must be at least 2")
    if kind in ("two", "four") and n % 2 != 0:
        raise ValueError(f"signal kind {kind!r} requires even n")
    if kind == "two":
        theta = np.zeros((n, n))
        theta[:, n // 2:] = 1.0
        return theta
    if kind == "four":
        h = n // 2
        theta = np.empty((n, n))
        theta[:h, :h] = 1.0
        theta[:h, h:] = 2.0
        theta[h:, :h] = 0.0
        theta[h:, h:] = 1.0
        return theta
    # worst: 1-based indicator I{i + j > n}
    i = np.arange(1, n + 1)
    return (i[:, None] + i[None, :] > n).astype(float)


def load_matrix_csv(path):
    """Read a matrix from plain CSV (no header, comma-separated decimals)."""
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                row = [float(f) for f in fields]
            except ValueError:
                raise ValueError(f"{path}: malformed CSV at row {lineno}")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {width}"
                )
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    return as_matrix(rows)


def save_matrix_csv(path, theta):
    """Write a matrix as plain CSV with round-trip exact precision."""
    theta = as_matrix(theta)
    with open(path, "w") as fh:
        for row in theta:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
