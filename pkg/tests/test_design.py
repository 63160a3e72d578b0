import numpy as np
import pytest

from pcha.design import build_design, enumerate_subsets, n_subsets
from pcha.errors import DataError


def test_enumerate_subsets_examples():
    assert enumerate_subsets(2, 2) == [(0,), (1,), (0, 1)]
    assert enumerate_subsets(3, 1) == [(0,), (1,), (2,)]
    assert len(enumerate_subsets(3, 2)) == 6 == n_subsets(3, 2)


@pytest.mark.parametrize("d,m", [(3, 0), (2, 3)])
def test_enumerate_subsets_range(d, m):
    with pytest.raises(DataError):
        enumerate_subsets(d, m)


def test_prefix_nesting():
    for d in range(1, 6):
        for m in range(1, d):
            assert enumerate_subsets(d, m) == enumerate_subsets(d, m + 1)[:n_subsets(d, m)]


def test_sorted_1d_is_unit_lower_triangular():
    x = np.array([[0.1], [0.3], [0.35], [0.8]])
    np.testing.assert_array_equal(build_design(x, x, 1), np.tril(np.ones((4, 4))))


def test_single_knot_row():
    p = np.array([[0.5, 0.5]])
    np.testing.assert_array_equal(build_design(p, p, 2), [[1, 1, 1]])


def test_non_strict_at_knot_and_values():
    knots = np.array([[0.2, 0.6], [0.5, 0.1]])
    ev = np.array([[0.5, 0.6]])
    # columns: s={1}: knots 0.2,0.5 ; s={2}: 0.6,0.1 ; s={1,2}: both coordinates
    np.testing.assert_array_equal(build_design(knots, ev, 2), [[1, 1, 1, 1, 1, 1]])
    ev = np.array([[0.4, 0.6]])
    np.testing.assert_array_equal(build_design(knots, ev, 2), [[1, 0, 1, 1, 1, 0]])


def test_design_shape_and_errors():
    X = np.random.default_rng(0).random((5, 3))
    assert build_design(X, X, 3).shape == (5, 5 * 7)
    with pytest.raises(DataError):
        build_design(X, X[:, :2], 1)
    with pytest.raises(DataError, match="budget"):
        build_design(X, X, 3, budget=10)
