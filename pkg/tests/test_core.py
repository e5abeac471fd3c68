import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tvgrid.core import (
    EdgeIndex,
    as_matrix,
    edge_count,
    edge_gradient,
    edges,
    load_matrix_csv,
    make_signal,
    save_matrix_csv,
    tv,
    tv_cols,
    tv_norm,
    tv_rows,
)

finite = st.floats(min_value=-100, max_value=100, allow_nan=False)


def small_matrices(max_side=6):
    return st.tuples(
        st.integers(1, max_side), st.integers(1, max_side)
    ).flatmap(lambda s: arrays(float, s, elements=finite))


def test_tv_constant_matrix():
    assert tv(np.full((3, 3), 5.0)) == 0.0


def test_tv_two_signal():
    theta = make_signal("two", 4)
    assert tv(theta) == 4.0
    assert tv_norm(theta) == 1.0


def test_tv_four_signal():
    theta = make_signal("four", 4)
    assert tv(theta) == 8.0
    assert tv_norm(theta) == 2.0


def test_tv_norm_rejects_rectangular():
    with pytest.raises(ValueError):
        tv_norm(np.zeros((2, 3)))


def test_tv_rows_cols_split():
    theta = make_signal("two", 4)
    assert tv_rows(theta) == 4.0
    assert tv_cols(theta) == 0.0
    row = np.array([[1.0, 3.0, 2.0]])
    assert tv_cols(row) == 0.0
    rng = np.random.default_rng(1)
    m = rng.standard_normal((5, 7))
    # direct summation oracle
    direct = sum(
        abs(m[i, j + 1] - m[i, j]) for i in range(5) for j in range(6)
    ) + sum(abs(m[i + 1, j] - m[i, j]) for i in range(4) for j in range(7))
    assert tv_rows(m) + tv_cols(m) == pytest.approx(tv(m), abs=0)
    assert tv(m) == pytest.approx(direct, rel=1e-12)


def test_edge_count_and_enumeration():
    for m, n in [(1, 1), (1, 5), (4, 4), (3, 7)]:
        es = list(edges(m, n))
        assert len(es) == edge_count(m, n)
        assert len(set(es)) == len(es)
    assert edge_count(4, 4) == 2 * 4 * 3


def test_edge_gradient_conventions():
    const = np.full((3, 3), 2.0)
    for e in edges(3, 3):
        assert edge_gradient(const, e) == 0.0
    theta = make_signal("two", 4)
    assert edge_gradient(theta, EdgeIndex("horizontal", 1, 1)) == 1.0
    assert edge_gradient(theta, EdgeIndex("vertical", 0, 2)) == 0.0
    with pytest.raises(ValueError):
        edge_gradient(theta, EdgeIndex("horizontal", 0, 3))


def test_make_signal_smallest_cases():
    assert make_signal("two", 2).tolist() == [[0, 1], [0, 1]]
    assert make_signal("four", 2).tolist() == [[1, 2], [0, 1]]
    assert make_signal("worst", 2).tolist() == [[0, 1], [1, 1]]


def test_make_signal_odd_n_rejected():
    with pytest.raises(ValueError):
        make_signal("two", 3)
    with pytest.raises(ValueError):
        make_signal("four", 5)
    make_signal("worst", 3)  # odd n is fine here


def test_worst_signal_tv_is_edge_counted():
    # direct edge counting gives 2(n-1), not the n-1 a 1 - 1/n normalized
    # value would imply
    for n in [4, 8, 16]:
        theta = make_signal("worst", n)
        assert tv(theta) == 2 * (n - 1)


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ValueError):
        as_matrix([[np.inf]])
    with pytest.raises(ValueError):
        as_matrix([1.0, 2.0])


@given(small_matrices(), st.floats(-50, 50))
def test_tv_translation_invariance(theta, c):
    assert tv(theta + c) == pytest.approx(tv(theta), rel=1e-9, abs=1e-9)


@given(small_matrices(), st.floats(-10, 10))
def test_tv_absolute_homogeneity(theta, a):
    assert tv(a * theta) == pytest.approx(abs(a) * tv(theta), rel=1e-9, abs=1e-9)


@given(st.tuples(st.integers(1, 6), st.integers(1, 6)).flatmap(
    lambda s: st.tuples(arrays(float, s, elements=finite),
                        arrays(float, s, elements=finite))))
def test_tv_triangle_inequality(pair):
    theta, phi = pair
    assert tv(theta + phi) <= tv(theta) + tv(phi) + 1e-9


@settings(max_examples=50)
@given(arrays(float, (6, 6), elements=finite), st.integers(0, 10**6))
def test_tv_superadditive_over_rect_partitions(theta, seed):
    rng = np.random.default_rng(seed)
    i = int(rng.integers(1, 6))
    j = int(rng.integers(1, 6))
    parts = [theta[:i, :j], theta[:i, j:], theta[i:, :j], theta[i:, j:]]
    assert sum(tv(p) for p in parts) <= tv(theta) + 1e-9


@given(arrays(float, st.integers(1, 12).map(lambda k: (k,)), elements=finite))
def test_1d_mean_approximation_bound(vec):
    # sum (theta_i - mean)^2 <= n * TV(theta)^2 for vectors
    n = len(vec)
    tv1 = float(np.abs(np.diff(vec)).sum())
    assert np.sum((vec - vec.mean()) ** 2) <= n * tv1**2 + 1e-6 * max(1.0, tv1**2)


@settings(max_examples=60)
@given(arrays(float, (10,), elements=finite), st.integers(0, 10**6))
def test_block_averaging_never_increases_1d_tv(vec, seed):
    rng = np.random.default_rng(seed)
    cuts = sorted(set(rng.integers(1, 10, size=3).tolist()))
    bounds = [0] + cuts + [10]
    out = vec.copy()
    for lo, hi in zip(bounds, bounds[1:]):
        out[lo:hi] = vec[lo:hi].mean()
    assert np.abs(np.diff(out)).sum() <= np.abs(np.diff(vec)).sum() + 1e-9


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    theta = rng.standard_normal((4, 7))
    path = tmp_path / "m.csv"
    save_matrix_csv(path, theta)
    back = load_matrix_csv(path)
    np.testing.assert_array_equal(back, theta)


def test_csv_malformed_reports_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3,oops\n")
    with pytest.raises(ValueError, match="row 2"):
        load_matrix_csv(path)
    path.write_text("1,2\n3\n")
    with pytest.raises(ValueError, match="row 2"):
        load_matrix_csv(path)
