import numpy as np
import pytest

from pcha.data import Dataset
from pcha.errors import ModelFileError
from pcha.estimators import predict
from pcha.modelio import MAGIC, dumps, load_model, loads, save_model
from pcha.tuning import tune


@pytest.fixture(scope="module")
def model():
    r = np.random.default_rng(0)
    X = r.random((40, 2)) * 10 - 3
    data = Dataset(X, X[:, 0] - X[:, 1] ** 2 / 10 + 0.1 * r.standard_normal(40), ("p", "q"), "y")
    return tune(data, "pchal", seed=1)[0]


def test_round_trip_exact(model, tmp_path):
    p = tmp_path / "m.pcha"
    save_model(model, p)
    back = load_model(p)
    for name in ("X_train", "beta", "U_k", "D_k", "gram_column_means"):
        np.testing.assert_array_equal(getattr(back, name), getattr(model, name))
    assert (back.m, back.k, back.lam, back.kind, back.y_mean, back.feature_names) == \
        (model.m, model.k, model.lam, model.kind, model.y_mean, model.feature_names)
    Xn = np.random.default_rng(1).random((9, 2)) * 12 - 4
    np.testing.assert_array_equal(predict(back, Xn), predict(model, Xn))


def test_bytes_stable(model):
    assert dumps(model) == dumps(loads(dumps(model)))


def test_corruption_detected(model):
    blob = bytearray(dumps(model))
    blob[len(blob) // 2] ^= 0xFF
    with pytest.raises(ModelFileError, match="checksum"):
        loads(bytes(blob))
    with pytest.raises(ModelFileError):
        loads(b"not a model")
    with pytest.raises(ModelFileError):
        loads(dumps(model)[:-40])


def test_version_mismatch_refused(model):
    import hashlib
    blob = dumps(model)
    body = blob[:-32].replace(b'"version":1', b'"version":2', 1)
    assert body != blob[:-32] and body.startswith(MAGIC)
    with pytest.raises(ModelFileError, match="version 2"):
        loads(body + hashlib.sha256(body).digest())


def test_missing_file(tmp_path):
    with pytest.raises(ModelFileError):
        load_model(tmp_path / "nope.pcha")
