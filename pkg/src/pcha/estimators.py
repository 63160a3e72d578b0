"""Closed-form ridge (PCHAR) and lasso (PCHAL) fits in principal-component coordinates.

Both solve a penalized least-squares problem in the PC scores
``Z_k = U_k diag(sqrt(d))``. Because ``Z_k^T Z_k = diag(d)`` the problems
separate coordinate by coordinate. With ``w_j = sqrt(d_j) u_j^T Y``:

* ridge, objective ``|Y - Z b|^2 / 2n + lam |b|_2^2 / 2``:  ``b_j = w_j / (d_j + n lam)``
* lasso, objective ``|Y - Z b|^2 / 2n + lam |b|_1``:  ``b_j = sign(w_j) (|w_j| - n lam)_+ / d_j``

Note the lasso threshold is ``n * lam`` on the scale of ``w``, so ``lam`` is on
the per-observation loss scale used by most lasso software.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Scaler
from .errors import DataError, NumericError
from .kernel import KernelConfig, center_cross, center_gram, cross_gram, gram
from .spectral import RANK_REL_TOL, GramSpectrum, eig_sym

KINDS = {"pchal": "lasso", "lasso": "lasso", "pchar": "ridge", "ridge": "ridge"}
MODEL_KIND = {"lasso": "pchal", "ridge": "pchar"}


def canonical_kind(kind: str) -> str:
    """Map ``pchal``/``lasso`` to ``lasso`` and ``pchar``/``ridge`` to ``ridge``."""
    try:
        return KINDS[kind.lower()]
    except (KeyError, AttributeError):
        raise DataError(f"unknown estimator kind {kind!r}; use pchal or pchar") from None


@dataclass(frozen=True)
class Coefs:
    beta: np.ndarray
    k: int
    lam: float
    kind: str


def _projections(spec: GramSpectrum, Y, k: int, name: str):
    Y = np.asarray(Y, dtype=np.float64).reshape(-1)
    if Y.shape[0] != spec.n:
        raise DataError(f"{name}: Y has length {Y.shape[0]}, spectrum has n={spec.n}")
    if not 1 <= k <= spec.r:
        raise DataError(f"{name}: need 1 <= k <= r={spec.r}, got k={k}")
    D = spec.D[:k]
    w = np.sqrt(D) * (spec.U[:, :k].T @ Y)
    return Y, D, w


def _degenerate(spec: GramSpectrum, k: int) -> np.ndarray:
    if spec.r == 0:
        return np.zeros(k, dtype=bool)
    return spec.D[:k] <= RANK_REL_TOL * spec.D[0]


def fit_pchar(spec: GramSpectrum, Y_centered, k: int, lam: float) -> Coefs:
    """Ridge coefficients ``(D_k + n lam)^-1 D_k^{1/2} U_k^T Y``."""
    if not lam > 0:
        raise DataError(f"fit_pchar: lambda must be positive, got {lam}")
    Y, D, w = _projections(spec, Y_centered, k, "fit_pchar")
    beta = w / (D + Y.shape[0] * lam)
    beta[_degenerate(spec, k)] = 0.0
    return Coefs(beta, k, float(lam), "ridge")


def fit_pchal(spec: GramSpectrum, Y_centered, k: int, lam: float) -> Coefs:
    """Lasso coefficients by soft-thresholding ``w`` at ``n lam`` and dividing by ``d_j``."""
    if lam < 0:
        raise DataError(f"fit_pchal: lambda must be >= 0, got {lam}")
    Y, D, w = _projections(spec, Y_centered, k, "fit_pchal")
    shrunk = np.maximum(np.abs(w) - Y.shape[0] * lam, 0.0)
    beta = np.sign(w) * shrunk / D
    beta[_degenerate(spec, k)] = 0.0
    return Coefs(beta, k, float(lam), "lasso")


def fit_coefs(kind: str, spec: GramSpectrum, Y_centered, k: int, lam: float) -> Coefs:
    if canonical_kind(kind) == "lasso":
        return fit_pchal(spec, Y_centered, k, lam)
    return fit_pchar(spec, Y_centered, k, lam)


def path_thresholds(spec: GramSpectrum, Y_centered) -> np.ndarray:
    """``W_j = sqrt(d_j) |u_j^T Y| / n``; component j is active in the lasso iff ``W_j > lam``."""
    Y = np.asarray(Y_centered, dtype=np.float64).reshape(-1)
    if Y.shape[0] != spec.n:
        raise DataError(f"path_thresholds: Y has length {Y.shape[0]}, spectrum n={spec.n}")
    return np.sqrt(spec.D) * np.abs(spec.U.T @ Y) / Y.shape[0]


def _soft(x, t):
    return np.sign(x) * max(abs(x) - t, 0.0)


def cd_lasso_oracle(Z, Y_centered, lam: float, tol: float = 1e-12,
                    max_sweeps: int = 10_000) -> Coefs:
    """Cyclic coordinate descent for ``|Y - Z b|^2 / 2n + lam |b|_1``.

    Generic solver that does not assume orthogonal columns; used to check the
    closed form. Stops when no coordinate moves by more than ``tol`` in a sweep.
    """
    Z = np.asarray(Z, dtype=np.float64)
    Y = np.asarray(Y_centered, dtype=np.float64).reshape(-1)
    if lam < 0:
        raise DataError(f"cd_lasso_oracle: lambda must be >= 0, got {lam}")
    n, k = Z.shape
    col_sq = np.einsum("ij,ij->j", Z, Z) / n
    beta = np.zeros(k)
    resid = Y.copy()
    for _ in range(max_sweeps):
        biggest = 0.0
        for j in range(k):
            if col_sq[j] == 0.0:
                continue
            old = beta[j]
            rho = Z[:, j] @ resid / n + col_sq[j] * old
            new = _soft(rho, lam) / col_sq[j]
            if new != old:
                resid -= Z[:, j] * (new - old)
                beta[j] = new
                biggest = max(biggest, abs(new - old))
        if biggest < tol:
            return Coefs(beta, k, float(lam), "lasso")
    raise NumericError(f"cd_lasso_oracle: no convergence in {max_sweeps} sweeps")


@dataclass(frozen=True)
class FittedModel:
    """Everything needed to predict at new raw covariates.

    ``X_train`` is on the scaled [0, 1] axis; ``U_k``/``D_k`` are the leading
    eigenpairs of the centered training Gram.
    """

    X_train: np.ndarray
    scaler: Scaler
    m: int
    k: int
    lam: float
    kind: str
    beta: np.ndarray
    y_mean: float
    gram_column_means: np.ndarray
    U_k: np.ndarray
    D_k: np.ndarray
    feature_names: tuple[str, ...] | None = field(default=None)

    @property
    def d(self) -> int:
        return self.X_train.shape[1]

    def fitted_values(self) -> np.ndarray:
        """In-sample fit ``y_mean + Z_k beta``."""
        return self.y_mean + (self.U_k * np.sqrt(self.D_k)) @ self.beta

    def check(self) -> None:
        n = self.X_train.shape[0]
        if self.U_k.shape != (n, self.k) or self.D_k.shape != (self.k,):
            raise DataError("FittedModel: spectral pieces do not match n and k")
        if self.beta.shape != (self.k,) or self.gram_column_means.shape != (n,):
            raise DataError("FittedModel: coefficient or column-mean length mismatch")
        if self.scaler.d != self.d:
            raise DataError("FittedModel: scaler dimension differs from X_train")


def fit_model(X_scaled, Y, scaler: Scaler, kind: str, m: int, k: int, lam: float,
              feature_names=None, spectrum: GramSpectrum | None = None,
              column_means=None) -> FittedModel:
    """Fit at fixed ``(m, k, lam)`` on already-scaled covariates.

    A precomputed centered-Gram ``spectrum`` (and its ``column_means``) can be
    passed to skip the kernel and eigendecomposition.
    """
    X = np.asarray(X_scaled, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64).reshape(-1)
    if spectrum is None:
        G = center_gram(gram(X, KernelConfig(m)))
        spectrum, column_means = eig_sym(G), G.column_means
    y_mean = float(Y.mean())
    coefs = fit_coefs(kind, spectrum, Y - y_mean, k, lam)
    return FittedModel(
        X_train=X,
        scaler=scaler,
        m=int(m),
        k=int(k),
        lam=float(lam),
        kind=MODEL_KIND[canonical_kind(kind)],
        beta=coefs.beta,
        y_mean=y_mean,
        gram_column_means=np.asarray(column_means, dtype=np.float64),
        U_k=np.ascontiguousarray(spectrum.U[:, :k]),
        D_k=spectrum.D[:k].copy(),
        feature_names=None if feature_names is None else tuple(feature_names),
    )


def predict_scaled(model: FittedModel, X_scaled) -> np.ndarray:
    """Predict at covariates already mapped to [0, 1]."""
    X = np.asarray(X_scaled, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.d:
        raise DataError(f"predict: model expects d={model.d} features, got {X.shape[1]}")
    Kc = center_cross(cross_gram(X, model.X_train, KernelConfig(model.m)),
                      model.gram_column_means)
    return model.y_mean + (Kc @ (model.U_k / np.sqrt(model.D_k))) @ model.beta


def predict(model: FittedModel, X_new_raw) -> np.ndarray:
    """Predict at raw covariates: scale (with clamping), cross-kernel, center, project."""
    X = np.asarray(X_new_raw, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :] if model.d > 1 or X.size == 1 else X[:, None]
    if X.shape[1] != model.scaler.d:
        raise DataError(
            f"predict: model expects d={model.scaler.d} features, got {X.shape[1]}"
        )
    return predict_scaled(model, model.scaler.transform(X))
