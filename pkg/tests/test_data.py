import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcha.data import Dataset, Scaler, load_covariates_csv, load_csv, make_folds, scale_apply, scale_fit
from pcha.errors import DataError


def _write(path, text):
    path.write_text(text)
    return path


def test_load_csv_by_name(tmp_path):
    p = _write(tmp_path / "t.csv", "a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
    ds = load_csv(p, "y")
    assert (ds.n, ds.d) == (3, 2)
    np.testing.assert_array_equal(ds.Y, [3, 6, 9])
    np.testing.assert_array_equal(ds.X[:, 1], [2, 5, 8])
    assert ds.feature_names == ("a", "b")


def test_load_csv_index_aliases_name(tmp_path):
    p = _write(tmp_path / "t.csv", "a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
    by_name, by_index = load_csv(p, "y"), load_csv(p, 3)
    np.testing.assert_array_equal(by_name.X, by_index.X)
    np.testing.assert_array_equal(by_name.Y, by_index.Y)


def test_load_csv_missing_value_names_row(tmp_path):
    p = _write(tmp_path / "t.csv", "a,b,y\n1,2,3\n4,,6\n7,8,9\n")
    with pytest.raises(DataError, match="row 2"):
        load_csv(p, "y")


@pytest.mark.parametrize("text,pattern", [
    ("a,b,y\n", "zero data rows"),
    ("a,b,y\n1,2,3\n", "'zz'"),
    ("a,b,y\n1,q,3\n", "column 'b'"),
])
def test_load_csv_errors(tmp_path, text, pattern):
    p = _write(tmp_path / "t.csv", text)
    col = "zz" if "'zz'" in pattern else "y"
    with pytest.raises(DataError, match=pattern):
        load_csv(p, col)


def test_load_csv_missing_file(tmp_path):
    with pytest.raises((DataError, FileNotFoundError)):
        load_csv(tmp_path / "absent.csv", "y")


def test_load_covariates_by_name_and_empty(tmp_path):
    p = _write(tmp_path / "n.csv", "y,b,a\n0,2,1\n")
    X, _ = load_covariates_csv(p, ("a", "b"))
    np.testing.assert_array_equal(X, [[1, 2]])
    X, _ = load_covariates_csv(_write(tmp_path / "e.csv", "a,b\n"), ("a", "b"))
    assert X.shape == (0, 2)


def test_scaler_examples():
    train = Dataset(np.array([[2.0, 5.0], [4.0, 5.0], [6.0, 5.0]]), np.zeros(3))
    sc = scale_fit(train)
    Z = scale_apply(sc, train).X
    np.testing.assert_array_equal(Z[:, 0], [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(Z[:, 1], [0.0, 0.0, 0.0])
    assert sc.transform(np.array([[8.0, 5.0]]))[0, 0] == 1.0
    assert sc.out_of_range(np.array([[8.0, 5.0], [3.0, 5.0]])) == 1


def test_scaler_dimension_mismatch():
    sc = Scaler(np.zeros(2), np.ones(2))
    with pytest.raises(DataError):
        sc.transform(np.zeros((3, 3)))


def test_dataset_rejects_nonfinite():
    with pytest.raises(DataError):
        Dataset(np.array([[np.nan]]), np.zeros(1))


@pytest.mark.parametrize("n,V,sizes", [(10, 5, [2, 2, 2, 2, 2]), (7, 3, [2, 2, 3])])
def test_make_folds_sizes(n, V, sizes):
    assert sorted(make_folds(n, V, 0).sizes().tolist()) == sizes


def test_make_folds_deterministic_and_errors():
    np.testing.assert_array_equal(make_folds(30, 5, 7).fold_of, make_folds(30, 5, 7).fold_of)
    for n, V in [(3, 4), (5, 1)]:
        with pytest.raises(DataError):
            make_folds(n, V, 0)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 80), data=st.data(), seed=st.integers(0, 2**31 - 1))
def test_fold_partition(n, data, seed):
    V = data.draw(st.integers(2, n))
    f = make_folds(n, V, seed)
    idx = np.concatenate([f.test_index(v) for v in range(1, V + 1)])
    assert sorted(idx.tolist()) == list(range(n))
    sizes = f.sizes()
    assert sizes.min() >= 1 and sizes.max() - sizes.min() <= 1


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=2, max_size=30))
def test_scaler_round_trip(rows):
    X = np.array(rows)
    sc = scale_fit(Dataset(X, np.zeros(len(rows))))
    Z = sc.transform(X)
    assert Z.min() >= 0.0 and Z.max() <= 1.0
    varying = sc.maxs > sc.mins
    back = sc.inverse(Z)
    colscale = np.maximum(np.maximum(np.abs(sc.mins), np.abs(sc.maxs)), 1e-300)
    rel = np.abs(back - X) / colscale
    assert np.all(rel[:, varying] <= 1e-12)
    np.testing.assert_array_equal(Z.min(axis=0)[varying], 0.0)
    np.testing.assert_array_equal(Z.max(axis=0)[varying], 1.0)
