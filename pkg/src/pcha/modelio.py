"""Binary model files.

Layout (all integers and floats little-endian)::

    b"PCHAMODEL\\n"
    <one line of JSON: version, kind, m, k, lambda, y_mean, n, d, feature names>
    payload: float64 arrays, in order
        scaler mins (d), scaler maxs (d), X_train (n*d, row-major),
        gram column means (n), U_k (n*k, row-major), D_k (k), beta (k)
    SHA-256 digest (32 bytes) of everything above

The JSON header is written with sorted keys and Python's shortest round-trip
float repr, so saving the same model twice yields identical bytes.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .data import Scaler
from .errors import ModelFileError
from .estimators import FittedModel

MAGIC = b"PCHAMODEL\n"
FORMAT_VERSION = 1
_DTYPE = np.dtype("<f8")


def _payload_layout(n, d, k):
    return [("mins", (d,)), ("maxs", (d,)), ("X_train", (n, d)),
            ("gram_column_means", (n,)), ("U_k", (n, k)), ("D_k", (k,)), ("beta", (k,))]


def dumps(model: FittedModel) -> bytes:
    model.check()
    n, d = model.X_train.shape
    header = {
        "format": "pcha-model",
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "m": model.m,
        "k": model.k,
        "lambda": model.lam,
        "y_mean": model.y_mean,
        "n": n,
        "d": d,
        "feature_names": list(model.feature_names) if model.feature_names else None,
    }
    arrays = {
        "mins": model.scaler.mins, "maxs": model.scaler.maxs, "X_train": model.X_train,
        "gram_column_means": model.gram_column_means, "U_k": model.U_k,
        "D_k": model.D_k, "beta": model.beta,
    }
    parts = [MAGIC, json.dumps(header, sort_keys=True, separators=(",", ":")).encode(), b"\n"]
    for name, shape in _payload_layout(n, d, model.k):
        arr = np.ascontiguousarray(arrays[name], dtype=_DTYPE)
        assert arr.shape == shape, (name, arr.shape, shape)
        parts.append(arr.tobytes(order="C"))
    body = b"".join(parts)
    return body + hashlib.sha256(body).digest()


def loads(blob: bytes) -> FittedModel:
    if not blob.startswith(MAGIC):
        raise ModelFileError("model file: bad magic; not a pcha model")
    if len(blob) < len(MAGIC) + 33:
        raise ModelFileError("model file: truncated")
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise ModelFileError("model file: checksum mismatch (file corrupt or truncated)")
    end = body.find(b"\n", len(MAGIC))
    if end < 0:
        raise ModelFileError("model file: missing header line")
    try:
        header = json.loads(body[len(MAGIC):end])
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"model file: unreadable header: {exc}") from exc
    if header.get("version") != FORMAT_VERSION:
        raise ModelFileError(
            f"model file: version {header.get('version')} is not supported "
            f"(expected {FORMAT_VERSION})"
        )
    n, d, k = header["n"], header["d"], header["k"]
    pos = end + 1
    arrays = {}
    for name, shape in _payload_layout(n, d, k):
        size = int(np.prod(shape)) * _DTYPE.itemsize
        chunk = body[pos:pos + size]
        if len(chunk) != size:
            raise ModelFileError(f"model file: payload too short while reading {name}")
        arrays[name] = np.frombuffer(chunk, dtype=_DTYPE).reshape(shape).astype(np.float64)
        pos += size
    if pos != len(body):
        raise ModelFileError("model file: trailing bytes after payload")
    names = header.get("feature_names")
    model = FittedModel(
        X_train=arrays["X_train"],
        scaler=Scaler(arrays["mins"], arrays["maxs"]),
        m=int(header["m"]),
        k=int(k),
        lam=float(header["lambda"]),
        kind=header["kind"],
        beta=arrays["beta"],
        y_mean=float(header["y_mean"]),
        gram_column_means=arrays["gram_column_means"],
        U_k=arrays["U_k"],
        D_k=arrays["D_k"],
        feature_names=tuple(names) if names else None,
    )
    model.check()
    return model


def save_model(model: FittedModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(model))


def load_model(path) -> FittedModel:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except FileNotFoundError:
        raise ModelFileError(f"model file: no such file: {path}") from None
    return loads(blob)
