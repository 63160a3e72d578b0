"""Datasets, CSV ingestion, min-max scaling and cross-validation folds."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Dataset:
    """Covariates ``X`` (n x d) and response ``Y`` (n,).

    Arrays are copied to float64 and validated on construction.
    """

    X: np.ndarray
    Y: np.ndarray
    feature_names: tuple[str, ...] | None = None
    response_name: str | None = None

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64)
        Y = np.array(self.Y, dtype=np.float64).reshape(-1)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise DataError(f"Dataset: X must be 2-D, got shape {X.shape}")
        n, d = X.shape
        if n < 1 or d < 1:
            raise DataError(f"Dataset: need n >= 1 and d >= 1, got n={n}, d={d}")
        if Y.shape[0] != n:
            raise DataError(f"Dataset: X has {n} rows but Y has {Y.shape[0]}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise DataError("Dataset: non-finite entries in X or Y")
        if self.feature_names is not None and len(self.feature_names) != d:
            raise DataError(
                f"Dataset: {len(self.feature_names)} feature names for d={d}"
            )
        X.flags.writeable = False
        Y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.X[idx], self.Y[idx], self.feature_names, self.response_name)


def _read_table(path):
    if not os.path.exists(path):
        raise DataError(f"load_csv: no such file: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"load_csv: {path} is empty (a header row is required)")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if any(c.strip() for c in r)]
    return header, body


def _resolve_column(header, response_column):
    if isinstance(response_column, str):
        if response_column in header:
            return header.index(response_column)
        try:
            response_column = int(response_column)
        except ValueError:
            raise DataError(
                f"load_csv: response column {response_column!r} not in header {header}"
            ) from None
    idx = int(response_column)
    # 1-based column index, so the last of d + 1 columns is d + 1
    if not 1 <= idx <= len(header):
        raise DataError(
            f"load_csv: response column index {idx} outside 1..{len(header)}"
        )
    return idx - 1


def parse_numeric_rows(header, body, path="<input>"):
    """Convert string rows to a float matrix, reporting the first bad cell."""
    ncol = len(header)
    out = np.empty((len(body), ncol), dtype=np.float64)
    for r, row in enumerate(body):
        # row numbers count data rows from 1 (the header is row 0)
        if len(row) != ncol:
            raise DataError(
                f"load_csv: {path}: row {r + 1} has {len(row)} fields, expected {ncol}"
            )
        for c, cell in enumerate(row):
            text = cell.strip()
            try:
                value = float(text)
            except ValueError:
                value = math.nan
            if not math.isfinite(value):
                what = "missing value" if text == "" else f"non-numeric value {text!r}"
                raise DataError(
                    f"load_csv: {path}: {what} in row {r + 1}, column {header[c]!r}"
                )
            out[r, c] = value
    return out


def load_csv(path, response_column) -> Dataset:
    """Read a comma-delimited numeric table with a header row.

    ``response_column`` is a header name or a 1-based column index. All other
    columns become covariates, in file order.
    """
    header, body = _read_table(path)
    j = _resolve_column(header, response_column)
    if not body:
        raise DataError(f"load_csv: {path} has a header but zero data rows")
    table = parse_numeric_rows(header, body, path)
    keep = [c for c in range(len(header)) if c != j]
    if not keep:
        raise DataError(f"load_csv: {path} has no covariate columns")
    return Dataset(
        table[:, keep],
        table[:, j],
        feature_names=tuple(header[c] for c in keep),
        response_name=header[j],
    )


def load_covariates_csv(path, feature_names=None) -> tuple[np.ndarray, tuple[str, ...]]:
    """Read a covariate-only CSV (used for prediction). May have zero rows.

    When ``feature_names`` is given and the file also contains extra columns
    (e.g. the response), only the named columns are kept, in that order.
    """
    header, body = _read_table(path)
    table = parse_numeric_rows(header, body, path) if body else np.empty((0, len(header)))
    if feature_names is None or list(header) == list(feature_names):
        return table, tuple(header)
    if all(f in header for f in feature_names):
        cols = [header.index(f) for f in feature_names]
        return table[:, cols], tuple(feature_names)
    if len(header) == len(feature_names):
        # positional match when the names differ
        return table, tuple(header)
    raise DataError(
        f"load_csv: {path} has columns {header}, model expects {list(feature_names)}"
    )


@dataclass(frozen=True)
class Scaler:
    """Per-feature min-max map onto [0, 1] learned from training data."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64).reshape(-1)
        maxs = np.asarray(self.maxs, dtype=np.float64).reshape(-1)
        if mins.shape != maxs.shape:
            raise DataError("Scaler: mins and maxs differ in length")
        if np.any(maxs < mins):
            raise DataError("Scaler: max < min for some feature")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def d(self) -> int:
        return self.mins.shape[0]

    def _check(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None] if self.d == 1 else X[None, :]
        if X.shape[1] != self.d:
            raise DataError(
                f"scale_apply: scaler fitted on d={self.d} features, data has {X.shape[1]}"
            )
        return X

    def transform(self, X) -> np.ndarray:
        X = self._check(X)
        span = self.maxs - self.mins
        const = span == 0
        Z = (X - self.mins) / np.where(const, 1.0, span)
        Z[:, const] = 0.0
        return np.clip(Z, 0.0, 1.0)

    def inverse(self, Z) -> np.ndarray:
        Z = self._check(Z)
        return self.mins + Z * (self.maxs - self.mins)

    def out_of_range(self, X) -> int:
        """Number of entries that fall outside the training range (and get clamped)."""
        X = self._check(X)
        return int(np.count_nonzero((X < self.mins) | (X > self.maxs)))


def scale_fit(train: Dataset) -> Scaler:
    return Scaler(train.X.min(axis=0), train.X.max(axis=0))


def scale_apply(scaler: Scaler, data: Dataset) -> Dataset:
    """Map ``data`` through ``scaler``; constant features become 0, outliers are clamped."""
    return Dataset(
        scaler.transform(data.X), data.Y, data.feature_names, data.response_name
    )


@dataclass(frozen=True)
class FoldAssignment:
    """Assignment of n observations to V folds labelled 1..V."""

    V: int
    fold_of: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return self.fold_of.shape[0]

    def test_index(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == v)

    def train_index(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != v)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.fold_of, minlength=self.V + 1)[1:]


def make_folds(n: int, V: int, seed: int) -> FoldAssignment:
    """Shuffle 0..n-1 with ``seed`` and deal the permutation round-robin into V folds."""
    n, V = int(n), int(V)
    if V < 2 or V > n:
        raise DataError(f"make_folds: need 2 <= V <= n, got V={V}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[perm] = np.arange(n) % V + 1
    fold_of.flags.writeable = False
    return FoldAssignment(V, fold_of, int(seed))
