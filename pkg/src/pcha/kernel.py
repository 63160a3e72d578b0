"""Closed-form highly adaptive (HA) kernel.

For points ``x, x'`` and training knots ``X_1..X_n`` let ``t_i`` be the number
of coordinates ``j`` with ``min(x_j, x'_j) >= X_ij``. The kernel restricted to
interactions of order at most ``m`` is

    K(x, x') = sum_i sum_{l=1}^{min(m, t_i)} C(t_i, l)

which is ``sum_i (2**t_i - 1)`` for ``m = d``. Entries are accumulated as exact
integers; floating point only enters at centering.

Three assembly routes give identical integers:

* ``naive``: per-pair loop over knots (reference, O(n^3 d) Python-level work);
* ``masks``: coordinate bitmasks per (point, knot) and a compiled popcount loop;
* ``blas``: sum over subsets ``s`` of ``H_s H_s^T`` with 0/1 float matrices,
  exact while every partial sum stays below the float mantissa limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numba
import numpy as np

from .errors import DataError, NumericError

# the bundled TBB is too old for numba; prefer OpenMP, fall back to workqueue
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_INT64_MAX = np.iinfo(np.int64).max
MAX_MASK_DIM = 62
# subset count up to which the BLAS route beats the popcount loop
BLAS_MAX_SUBSETS = 16
_ROW_CHUNK = 4096


@dataclass(frozen=True)
class KernelConfig:
    """Interaction-order cap ``m`` and whether the Gram is double-centered."""

    m: int
    center: bool = True

    def check(self, d: int) -> None:
        if not 1 <= self.m <= d:
            raise DataError(f"KernelConfig: need 1 <= m <= d, got m={self.m}, d={d}")


@dataclass(frozen=True)
class GramMatrix:
    """Square Gram matrix plus the column means of its uncentered version."""

    K: np.ndarray
    column_means: np.ndarray
    centered: bool = False

    @property
    def n(self) -> int:
        return self.K.shape[0]


def subset_count_table(d: int, m: int) -> np.ndarray:
    """``table[t]`` = number of nonempty subsets of size <= m of a t-element set."""
    if not 1 <= m <= d:
        raise DataError(f"subset_count_table: need 1 <= m <= d, got m={m}, d={d}")
    vals = [sum(comb(t, ell) for ell in range(1, min(m, t) + 1)) for t in range(d + 1)]
    if vals[-1] > _INT64_MAX:
        raise NumericError(f"subset_count_table: counts overflow int64 at d={d}")
    return np.array(vals, dtype=np.int64)


def active_count(u, v, knot) -> int:
    """Number of coordinates where ``min(u, v)`` reaches ``knot``."""
    u, v, knot = (np.asarray(a, dtype=np.float64).reshape(-1) for a in (u, v, knot))
    if not (u.shape == v.shape == knot.shape):
        raise DataError(
            f"active_count: dimension mismatch {u.shape}, {v.shape}, {knot.shape}"
        )
    return int(np.count_nonzero(np.minimum(u, v) >= knot))


def _as_points(X, name):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DataError(f"{name}: expected a 2-D array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DataError(f"{name}: non-finite entries")
    return X


def _check_capacity(n_knots, table):
    if n_knots and int(table[-1]) > _INT64_MAX // n_knots:
        raise NumericError(
            f"kernel: n={n_knots} knots times {int(table[-1])} subsets overflows int64"
        )


# -- naive reference --------------------------------------------------------

def _naive(P, X, table, symmetric):
    N, n = P.shape[0], X.shape[0]
    out = np.zeros((N, n), dtype=np.int64)
    for a in range(N):
        for b in range(a if symmetric else 0, n):
            t = np.count_nonzero(np.minimum(P[a], X[b]) >= X, axis=1)
            out[a, b] = table[t].sum()
            if symmetric:
                out[b, a] = out[a, b]
    return out


# -- bitmask route ----------------------------------------------------------

def coordinate_masks(P, X) -> np.ndarray:
    """``M[a, i]`` has bit j set iff ``P[a, j] >= X[i, j]``."""
    d = X.shape[1]
    if d > MAX_MASK_DIM:
        raise DataError(f"kernel: bitmask route supports d <= {MAX_MASK_DIM}, got {d}")
    M = np.zeros((P.shape[0], X.shape[0]), dtype=np.int64)
    for j in range(d):
        M |= (P[:, j][:, None] >= X[:, j][None, :]).astype(np.int64) << j
    return M


@numba.njit(cache=True, inline="always")
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@numba.njit(parallel=True, cache=True)
def _mask_kernel(MA, MB, table, symmetric):
    N, n = MA.shape
    nb = MB.shape[0]
    out = np.zeros((N, nb), dtype=np.int64)
    for a in numba.prange(N):
        start = a if symmetric else 0
        for b in range(start, nb):
            s = 0
            for i in range(n):
                s += table[_popcount(MA[a, i] & MB[b, i])]
            out[a, b] = s
    if symmetric:
        for a in range(N):
            for b in range(a):
                out[a, b] = out[b, a]
    return out


def _masks(P, X, table, symmetric):
    MX = coordinate_masks(X, X)
    if symmetric:
        return _mask_kernel(MX, MX, table, True)
    out = np.empty((P.shape[0], X.shape[0]), dtype=np.int64)
    for lo in range(0, P.shape[0], _ROW_CHUNK):
        MP = coordinate_masks(P[lo:lo + _ROW_CHUNK], X)
        out[lo:lo + _ROW_CHUNK] = _mask_kernel(MP, MX, table, False)
    return out


# -- BLAS route -------------------------------------------------------------

def _subset_indicators(ge, m):
    """Yield the (rows x knots) indicator of each subset, size by size."""
    d = len(ge)
    level = {(j,): ge[j] for j in range(d)}
    yield from level.values()
    for size in range(2, m + 1):
        nxt = {}
        for s, ind in level.items():
            for j in range(s[-1] + 1, d):
                nxt[s + (j,)] = ind & ge[j]
        level = nxt
        yield from level.values()


def _blas(P, X, m, symmetric):
    n, d = X.shape
    total = n * int(subset_count_table(d, m)[-1])
    dtype = np.float32 if total < 2**24 else np.float64
    if total >= 2**53:
        raise NumericError("kernel: BLAS route cannot represent the entries exactly")
    ge_x = [X[:, j][:, None] >= X[:, j][None, :] for j in range(d)]
    if symmetric:
        acc = np.zeros((n, n), dtype=dtype)
        for ind in _subset_indicators(ge_x, m):
            A = ind.astype(dtype)
            acc += A @ A.T
        return np.rint(acc).astype(np.int64)
    out = np.empty((P.shape[0], n), dtype=np.int64)
    train_inds = [ind.astype(dtype) for ind in _subset_indicators(ge_x, m)]
    for lo in range(0, P.shape[0], _ROW_CHUNK):
        Pc = P[lo:lo + _ROW_CHUNK]
        ge_p = [Pc[:, j][:, None] >= X[:, j][None, :] for j in range(d)]
        acc = np.zeros((Pc.shape[0], n), dtype=dtype)
        for ind, B in zip(_subset_indicators(ge_p, m), train_inds):
            acc += ind.astype(dtype) @ B.T
        out[lo:lo + _ROW_CHUNK] = np.rint(acc)
    return out


def _assemble(P, X, m, symmetric, method):
    d = X.shape[1]
    table = subset_count_table(d, m)
    _check_capacity(X.shape[0], table)
    if method == "auto":
        if sum(comb(d, ell) for ell in range(1, m + 1)) <= BLAS_MAX_SUBSETS:
            method = "blas"
        elif d <= MAX_MASK_DIM:
            method = "masks"
        else:
            method = "naive"
    if method == "naive":
        return _naive(P, X, table, symmetric)
    if method == "masks":
        return _masks(P, X, table, symmetric)
    if method == "blas":
        return _blas(P, X, m, symmetric)
    raise ValueError(f"unknown kernel method {method!r}")


def gram(X, config: KernelConfig, method: str = "auto") -> GramMatrix:
    """Uncentered Gram ``K[a, b] = K_{<=m}(X_a, X_b)`` with knots at the rows of X."""
    X = _as_points(X, "gram")
    config.check(X.shape[1])
    K = _assemble(X, X, config.m, True, method)
    return GramMatrix(K, K.mean(axis=0), centered=False)


def cross_gram(X_new, X_train, config: KernelConfig, method: str = "auto") -> np.ndarray:
    """``K'[a, b] = K_{<=m}(X_new_a, X_train_b)``; knots are always the training rows."""
    X_new = _as_points(X_new, "cross_gram")
    X_train = _as_points(X_train, "cross_gram")
    if X_new.shape[1] != X_train.shape[1]:
        raise DataError(
            f"cross_gram: new points have d={X_new.shape[1]}, training d={X_train.shape[1]}"
        )
    config.check(X_train.shape[1])
    if X_new.shape[0] == 0:
        return np.zeros((0, X_train.shape[0]), dtype=np.int64)
    return _assemble(X_new, X_train, config.m, False, method)


def center_gram(G) -> GramMatrix:
    """Double-centered ``J K J`` with ``J = I - 11^T / n``.

    Integer input is centered exactly in integer arithmetic (``n^2 JKJ`` is an
    integer matrix) and divided once, so each entry carries a single rounding.
    """
    K = G.K if isinstance(G, GramMatrix) else np.asarray(G)
    if isinstance(G, GramMatrix) and G.centered:
        raise DataError("center_gram: matrix is already centered")
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DataError(f"center_gram: expected a square matrix, got shape {K.shape}")
    n = K.shape[0]
    if np.issubdtype(K.dtype, np.integer) and _fits_exact(K, n):
        K = K.astype(np.int64)
        col = K.sum(axis=0)
        row = K.sum(axis=1)
        tot = int(col.sum())
        num = n * n * K - n * col[None, :] - n * row[:, None] + tot
        Kc = num / float(n * n)
        means = col / n
    else:
        K = K.astype(np.float64)
        means = K.mean(axis=0)
        Kc = K - means[None, :] - K.mean(axis=1)[:, None] + means.mean()
        Kc = 0.5 * (Kc + Kc.T)
    return GramMatrix(Kc, means, centered=True)


def _fits_exact(K, n):
    if K.size == 0:
        return True
    big = int(np.abs(K).max())
    return big * n * n * 4 < 2**53


def center_cross(K_new, column_means) -> np.ndarray:
    """Centered cross-kernel ``(K' - 1 c^T) J`` for uncentered training column means ``c``."""
    K_new = np.asarray(K_new, dtype=np.float64)
    c = np.asarray(column_means, dtype=np.float64).reshape(-1)
    if K_new.ndim != 2 or K_new.shape[1] != c.shape[0]:
        raise DataError(
            f"center_cross: cross-kernel shape {K_new.shape} vs {c.shape[0]} column means"
        )
    R = K_new - c[None, :]
    return R - R.mean(axis=1, keepdims=True)
