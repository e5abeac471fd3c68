"""Greedy TV-driven partition schemes, block averaging and the epsilon-net map.

The 2-D scheme repeatedly quarters any rectangle whose submatrix has TV above
the threshold; the split gives the top-left child ceil(nr/2) rows and
ceil(nc/2) columns, a dimension of size 1 is not split further, and leaves
are emitted depth-first in quadrant order (top-left, top-right, bottom-left,
bottom-right).  The 1-D scheme halves a sequence of columns, rows, or vector
entries the same way.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import as_matrix, tv, tv_cols, tv_rows


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle of grid indices, bounds inclusive."""

    row_lo: int
    row_hi: int
    col_lo: int
    col_hi: int

    def __post_init__(self):
        if self.row_hi < self.row_lo or self.col_hi < self.col_lo:
            raise ValueError(f"empty rectangle {self}")

    @property
    def nr(self):
        return self.row_hi - self.row_lo + 1

    @property
    def nc(self):
        return self.col_hi - self.col_lo + 1

    @property
    def slice(self):
        return (slice(self.row_lo, self.row_hi + 1),
                slice(self.col_lo, self.col_hi + 1))


@dataclass(frozen=True)
class RectPartition:
    rects: tuple
    shape: tuple

    def __post_init__(self):
        m, n = self.shape
        covered = np.zeros((m, n), dtype=bool)
        for r in self.rects:
            if r.row_hi >= m or r.col_hi >= n or r.row_lo < 0 or r.col_lo < 0:
                raise ValueError(f"{r} out of bounds for shape {self.shape}")
            block = covered[r.slice]
            if block.any():
                raise ValueError(f"{r} overlaps another rectangle")
            block[:] = True
        if not covered.all():
            raise ValueError("rectangles do not cover the grid")

    def __len__(self):
        return len(self.rects)

    def to_json(self):
        return json.dumps(
            [
                {"row_lo": r.row_lo, "row_hi": r.row_hi,
                 "col_lo": r.col_lo, "col_hi": r.col_hi}
                for r in self.rects
            ]
        )

    @classmethod
    def from_json(cls, text, shape):
        rects = tuple(
            Rect(d["row_lo"], d["row_hi"], d["col_lo"], d["col_hi"])
            for d in json.loads(text)
        )
        return cls(rects=rects, shape=shape)


def greedy_tv_partition(theta, eps):
    """Quadtree subdivision until every block's TV is at most eps."""
    theta = as_matrix(theta)
    if eps <= 0:
        raise ValueError("eps must be positive")
    m, n = theta.shape
    leaves = []

    def descend(r):
        if tv(theta[r.slice]) <= eps:
            leaves.append(r)
            return
        row_mid = r.row_lo + math.ceil(r.nr / 2) - 1
        col_mid = r.col_lo + math.ceil(r.nc / 2) - 1
        row_cuts = [(r.row_lo, row_mid), (row_mid + 1, r.row_hi)] if r.nr > 1 \
            else [(r.row_lo, r.row_hi)]
        col_cuts = [(r.col_lo, col_mid), (col_mid + 1, r.col_hi)] if r.nc > 1 \
            else [(r.col_lo, r.col_hi)]
        for rlo, rhi in row_cuts:
            for clo, chi in col_cuts:
                descend(Rect(rlo, rhi, clo, chi))

    descend(Rect(0, m - 1, 0, n - 1))
    return RectPartition(rects=tuple(leaves), shape=(m, n))


#: superadditive functionals usable with greedy_1d_partition
T_TAGS = ("vector_tv", "tv_rows_of_columns", "tv_cols_of_rows")


def _t_eval(tag, U, lo, hi):
    if tag == "vector_tv":
        seg = U[lo:hi]
        return float(np.abs(np.diff(seg)).sum())
    if tag == "tv_rows_of_columns":
        return tv_rows(U[:, lo:hi])
    if tag == "tv_cols_of_rows":
        return tv_cols(U[lo:hi, :])
    raise ValueError(f"unknown functional tag {tag!r}")


def greedy_1d_partition(tag, U, eps):
    """Binary subdivision of a sequence until T of every block is at most eps.

    ``vector_tv`` splits a 1-D vector; ``tv_rows_of_columns`` splits the
    columns of a matrix with T the within-block horizontal TV;
    ``tv_cols_of_rows`` splits the rows with T the within-block vertical TV.
    Returns ordered (start, stop) index pairs, stop exclusive.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if tag == "vector_tv":
        U = np.asarray(U, dtype=float)
        if U.ndim != 1:
            raise ValueError("vector_tv expects a 1-D vector")
        length = U.shape[0]
    else:
        U = as_matrix(U)
        length = U.shape[1] if tag == "tv_rows_of_columns" else U.shape[0]
    blocks = []

    def descend(lo, hi):
        if hi - lo == 1 or _t_eval(tag, U, lo, hi) <= eps:
            blocks.append((lo, hi))
            return
        mid = lo + (hi - lo) // 2
        descend(lo, mid)
        descend(mid, hi)

    descend(0, length)
    return blocks


def block_average(theta, P):
    """Replace every block of theta by its mean over the partition P."""
    theta = as_matrix(theta)
    if theta.shape != tuple(P.shape):
        raise ValueError(f"partition shape {P.shape} does not match {theta.shape}")
    out = np.empty_like(theta)
    for r in P.rects:
        out[r.slice] = theta[r.slice].mean()
    return out


def gns_bound(theta):
    """Both sides of the discrete Gagliardo-Nirenberg-Sobolev inequality.

    Returns (lhs, rhs) with lhs the centered sum of squares and
    rhs = (5 + 4mn / min(m, n)^2) * tv(theta)^2; for square theta the factor
    is 9.
    """
    theta = as_matrix(theta)
    m, n = theta.shape
    lhs = float(np.sum((theta - theta.mean()) ** 2))
    rhs = (5.0 + 4.0 * m * n / min(m, n) ** 2) * tv(theta) ** 2
    return lhs, rhs


#: explicit constant of the greedy partition cardinality bound
PARTITION_CONSTANT = 3.0


def epsilon_net_representative(theta, eps, L):
    """Map theta to its epsilon-net representative: partition, average, quantize.

    Partitions at the threshold eta = min(eps^2 / (2 C tv log n),
    eps / sqrt(2 C log n)) with C = 3, block-averages, then rounds every block
    value to a grid of spacing eps/n inside [-L, L].  The output is within
    2 * eps of theta in Frobenius norm.
    """
    theta = as_matrix(theta)
    if eps <= 0 or L <= 0:
        raise ValueError("eps and L must be positive")
    if np.abs(theta).max() > L:
        raise ValueError("theta must satisfy ||theta||_inf <= L")
    m, n = theta.shape
    t = tv(theta)
    logn = math.log(max(m, n, 2))
    if t > 0:
        eta = min(
            eps * eps / (2.0 * PARTITION_CONSTANT * t * logn),
            eps / math.sqrt(2.0 * PARTITION_CONSTANT * logn),
        )
        P = greedy_tv_partition(theta, eta)
    else:
        P = RectPartition(rects=(Rect(0, m - 1, 0, n - 1),), shape=(m, n))
    avg = block_average(theta, P)
    h = eps / max(m, n)
    quantized = -L + np.round((avg + L) / h) * h
    np.clip(quantized, -L, L, out=quantized)
    return quantized
