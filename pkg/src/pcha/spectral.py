"""Eigendecomposition of HA Gram matrices and the sine eigensystem of ordered samples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericError
from .kernel import GramMatrix

RANK_REL_TOL = 1e-10
SYMMETRY_TOL = 1e-8


@dataclass(frozen=True)
class GramSpectrum:
    """Leading eigenpairs ``K u_j = d_j u_j`` with ``d_1 >= ... >= d_r > 0``.

    ``U`` is n x r with orthonormal columns, ``D`` has length r.
    """

    U: np.ndarray
    D: np.ndarray

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def r(self) -> int:
        return self.D.shape[0]


def fix_signs(U: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive (first on ties)."""
    if U.size == 0:
        return U
    lead = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[lead, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def eig_sym(K, rel_tol: float = RANK_REL_TOL) -> GramSpectrum:
    """Descending eigenpairs of a symmetric matrix, keeping ``d_j > rel_tol * d_1``."""
    K = K.K if isinstance(K, GramMatrix) else K
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DataError(f"eig_sym: expected a square matrix, got shape {K.shape}")
    scale = max(float(np.abs(K).max(initial=0.0)), 1.0)
    if np.abs(K - K.T).max(initial=0.0) > SYMMETRY_TOL * scale:
        raise NumericError("eig_sym: matrix is not symmetric")
    try:
        w, V = np.linalg.eigh(K)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eig_sym: eigensolver failed: {exc}") from exc
    w, V = w[::-1], V[:, ::-1]
    if w.size == 0 or w[0] <= 0:
        return GramSpectrum(np.zeros((K.shape[0], 0)), np.zeros(0))
    keep = w > rel_tol * w[0]
    r = int(np.count_nonzero(keep))
    return GramSpectrum(fix_signs(np.ascontiguousarray(V[:, :r])), w[:r].copy())


def pc_scores(spec: GramSpectrum, k: int) -> np.ndarray:
    """PC score matrix ``U_k diag(sqrt(d_j))`` (n x k)."""
    if not 1 <= k <= spec.r:
        raise DataError(f"pc_scores: need 1 <= k <= r={spec.r}, got k={k}")
    return spec.U[:, :k] * np.sqrt(spec.D[:k])


def sine_eigenvalues(n: int, d: int = 1) -> np.ndarray:
    """``(2^d - 1) / (4 sin^2((2k - 1) pi / (4n + 2)))`` for k = 1..n (descending)."""
    if n < 1 or d < 1:
        raise DataError(f"sine_eigenvalues: need n >= 1 and d >= 1, got n={n}, d={d}")
    k = np.arange(1, n + 1)
    half_angle = (2 * k - 1) * np.pi / (4 * n + 2)
    return (2.0**d - 1.0) / (4.0 * np.sin(half_angle) ** 2)


def sine_eigensystem(n: int, d: int = 1) -> GramSpectrum:
    """Closed-form eigensystem of ``(2^d - 1) min(i, j)``, the Gram of a totally ordered sample.

    Eigenvectors are the discrete sine vectors
    ``u_k(i) = sqrt(4 / (2n + 1)) sin((2k - 1) i pi / (2n + 1))``, returned under
    the same sign convention as :func:`eig_sym`.
    """
    D = sine_eigenvalues(n, d)
    i = np.arange(1, n + 1)[:, None]
    k = np.arange(1, n + 1)[None, :]
    U = np.sqrt(4.0 / (2 * n + 1)) * np.sin((2 * k - 1) * i * np.pi / (2 * n + 1))
    return GramSpectrum(fix_signs(U), D)


def total_order(X) -> np.ndarray | None:
    """Permutation making every coordinate strictly increasing, or ``None`` if none exists."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    perm = np.argsort(X[:, 0], kind="stable")
    Xs = X[perm]
    if Xs.shape[0] > 1 and not np.all(np.diff(Xs, axis=0) > 0):
        return None
    return perm
