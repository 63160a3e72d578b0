"""Cross-validated choice of penalty, rank and interaction order.

Procedure for one interaction order ``m``:

1. For every rank ``k`` and penalty ``lam``, V-fold CV risk: fit on the
   complement of each fold (its own Gram, centering and spectrum) and score
   the held-out fold through the cross-kernel prediction path.
2. ``lam_hat(k)`` minimizes the CV risk over the penalty grid.
3. Refit on the full sample at ``(k, lam_hat(k))``; ``k_hat`` minimizes the
   resulting training MSE.

Interaction orders are scanned forward, ``m = 1, 2, ...``, and the scan stops
at the first order whose profiled risk (minimum over its (k, lam) cells) does
not strictly improve on the previous one.

Both estimators act componentwise, so for a fixed fold the whole (k, lam)
surface comes from one spectrum: predictions for every k are cumulative sums
over components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, FoldAssignment, Scaler, make_folds, scale_apply, scale_fit
from .errors import DataError, InfeasibleError
from .estimators import FittedModel, canonical_kind, fit_model
from .kernel import KernelConfig, center_cross, center_gram, cross_gram, gram
from .spectral import GramSpectrum, eig_sym

DEFAULT_LAMBDAS = np.logspace(-9, 1, 25)
DEFAULT_V = 5
FULL_K_GRID_MAX_N = 400
LOG_K_GRID_SIZE = 64


def default_k_grid(n: int, r: int) -> np.ndarray:
    """All ranks 1..r for n <= 400, otherwise 64 log-spaced ranks up to r."""
    if r < 1:
        return np.zeros(0, dtype=np.int64)
    if n <= FULL_K_GRID_MAX_N:
        return np.arange(1, r + 1)
    size = LOG_K_GRID_SIZE
    if r <= size:
        return np.arange(1, r + 1)
    # dense 1..j head, then a geometric tail; smallest j whose rounded tail stays distinct
    for j in range(size):
        tail = np.rint(np.geomspace(j + 1, r, size - j)).astype(np.int64)
        if tail[0] > j and np.all(np.diff(tail) > 0):
            return np.concatenate([np.arange(1, j + 1), tail])
    return np.arange(1, size + 1)


@dataclass(frozen=True)
class TuningGrid:
    """Candidate ranks (``None`` = default grid), penalties, order cap and fold count."""

    k_candidates: tuple[int, ...] | None = None
    lambda_grid: tuple[float, ...] = tuple(DEFAULT_LAMBDAS)
    m_max: int | None = None
    V: int = DEFAULT_V

    def __post_init__(self):
        lams = np.asarray(self.lambda_grid, dtype=np.float64).reshape(-1)
        if lams.size == 0 or not np.all(lams > 0) or not np.all(np.isfinite(lams)):
            raise DataError("TuningGrid: lambda grid must be non-empty, positive and finite")
        object.__setattr__(self, "lambda_grid", tuple(np.unique(lams)))
        if self.k_candidates is not None:
            ks = sorted({int(k) for k in self.k_candidates})
            if not ks or ks[0] < 1:
                raise DataError("TuningGrid: k candidates must be positive integers")
            object.__setattr__(self, "k_candidates", tuple(ks))
        if self.m_max is not None and self.m_max < 1:
            raise DataError("TuningGrid: m_max must be >= 1")

    @property
    def lambdas(self) -> np.ndarray:
        return np.asarray(self.lambda_grid)

    def ks(self, n: int, r: int) -> np.ndarray:
        if self.k_candidates is None:
            return default_k_grid(n, r)
        return np.asarray(self.k_candidates, dtype=np.int64)


def coef_path(kind: str, D: np.ndarray, w: np.ndarray, n: int, lambdas) -> np.ndarray:
    """Coefficients for every penalty (rows) and component (columns)."""
    nl = n * np.asarray(lambdas, dtype=np.float64)[:, None]
    if canonical_kind(kind) == "lasso":
        return np.sign(w) * np.maximum(np.abs(w) - nl, 0.0) / D
    return w / (D + nl)


@dataclass
class _FoldFit:
    r: int
    n_train: int
    D: np.ndarray
    w: np.ndarray
    y_mean: float
    scores_test: np.ndarray
    y_test: np.ndarray


class OrderState:
    """Per-fold and full-sample spectra for one interaction order.

    ``X`` must already be scaled. The full-sample pieces (``spectrum``,
    ``column_means``, ``w``) are reused for the final refit.
    """

    def __init__(self, X, Y, m: int, folds: FoldAssignment):
        X = np.asarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if folds.n != X.shape[0]:
            raise DataError(f"cv: folds cover n={folds.n}, data has n={X.shape[0]}")
        self.X, self.Y, self.m, self.folds = X, Y, int(m), folds
        cfg = KernelConfig(self.m)
        cfg.check(X.shape[1])
        self.fold_fits = []
        for v in range(1, folds.V + 1):
            tr, te = folds.train_index(v), folds.test_index(v)
            G = center_gram(gram(X[tr], cfg))
            spec = eig_sym(G)
            y_mean = float(Y[tr].mean())
            w = np.sqrt(spec.D) * (spec.U.T @ (Y[tr] - y_mean))
            Kc = center_cross(cross_gram(X[te], X[tr], cfg), G.column_means)
            scores = Kc @ (spec.U / np.sqrt(spec.D)) if spec.r else np.zeros((te.size, 0))
            self.fold_fits.append(_FoldFit(spec.r, tr.size, spec.D, w, y_mean, scores, Y[te]))
        G = center_gram(gram(X, cfg))
        self.spectrum: GramSpectrum = eig_sym(G)
        self.column_means = G.column_means
        self.y_mean = float(Y.mean())
        self.w = np.sqrt(self.spectrum.D) * (self.spectrum.U.T @ (Y - self.y_mean))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def max_feasible_k(self) -> int:
        return min([f.r for f in self.fold_fits] + [self.spectrum.r])

    def cv_table(self, kind: str, ks, lambdas) -> np.ndarray:
        """CV risk for each (k, lam); NaN where k exceeds a fold or full-sample rank."""
        ks = np.asarray(ks, dtype=np.int64)
        lambdas = np.asarray(lambdas, dtype=np.float64)
        feasible = ks <= self.max_feasible_k
        out = np.full((ks.size, lambdas.size), np.nan)
        if not feasible.any():
            return out
        cols = ks[feasible] - 1
        kmax = int(ks[feasible].max())
        acc = np.zeros((cols.size, lambdas.size))
        for f in self.fold_fits:
            B = coef_path(kind, f.D[:kmax], f.w[:kmax], f.n_train, lambdas)
            for li in range(lambdas.size):
                pred = np.cumsum(f.scores_test[:, :kmax] * B[li], axis=1)[:, cols]
                resid = (f.y_test - f.y_mean)[:, None] - pred
                acc[:, li] += np.mean(resid**2, axis=0)
        out[feasible] = acc / len(self.fold_fits)
        return out

    def train_mse(self, kind: str, ks, lam_of_k) -> np.ndarray:
        """Full-sample training MSE at ``(k, lam_of_k[i])`` for each rank."""
        spec = self.spectrum
        out = np.empty(len(ks))
        Yc = self.Y - self.y_mean
        for i, (k, lam) in enumerate(zip(ks, lam_of_k)):
            beta = coef_path(kind, spec.D[:k], self.w[:k], self.n, [lam])[0]
            fit = (spec.U[:, :k] * np.sqrt(spec.D[:k])) @ beta
            out[i] = np.mean((Yc - fit) ** 2)
        return out


def _argmin_prefer_last(values) -> int:
    values = np.asarray(values, dtype=np.float64)
    clean = np.where(np.isnan(values), np.inf, values)
    return int(clean.size - 1 - np.argmin(clean[::-1]))


def _argmin_prefer_first(values) -> int:
    values = np.asarray(values, dtype=np.float64)
    return int(np.argmin(np.where(np.isnan(values), np.inf, values)))


def _state(data: Dataset, m, folds) -> OrderState:
    return OrderState(data.X, data.Y, m, folds)


def cv_risk(data: Dataset, m: int, k: int, lam: float, folds: FoldAssignment,
            kind: str) -> float:
    """V-fold CV risk of one (m, k, lam) cell; NaN if k exceeds some fold's rank."""
    return float(_state(data, m, folds).cv_table(kind, [k], [lam])[0, 0])


def _select_lambda_row(row, lambdas):
    if np.all(np.isnan(row)):
        raise InfeasibleError("select_lambda: every cell is infeasible")
    i = _argmin_prefer_last(row)
    return float(lambdas[i]), float(row[i])


def select_lambda(data: Dataset, m: int, k: int, grid: TuningGrid,
                  folds: FoldAssignment, kind: str) -> tuple[float, float]:
    """Penalty minimizing CV risk at fixed (m, k); ties go to the larger penalty."""
    row = _state(data, m, folds).cv_table(kind, [k], grid.lambdas)[0]
    return _select_lambda_row(row, grid.lambdas)


@dataclass
class _KSelection:
    k_hat: int
    lam_hat: float
    lambda_hat_of_k: dict
    train_mse_of_k: dict
    cv_of_k: dict


def _select_k_from_state(state: OrderState, table, ks, lambdas, kind, by="train"):
    feasible = ~np.all(np.isnan(table), axis=1)
    if not feasible.any():
        raise InfeasibleError(
            f"select_k: no feasible rank at m={state.m} (max feasible k = {state.max_feasible_k})"
        )
    ks_f = ks[feasible]
    picks = [_select_lambda_row(row, lambdas) for row in table[feasible]]
    lam_of_k = np.array([p[0] for p in picks])
    cv_of_k = np.array([p[1] for p in picks])
    mse = state.train_mse(kind, ks_f, lam_of_k)
    if by == "train":
        i = _argmin_prefer_first(mse)
    elif by == "cv":
        i = _argmin_prefer_first(cv_of_k)
    else:
        raise DataError(f"select_k: unknown criterion {by!r}; use 'train' or 'cv'")
    return _KSelection(
        int(ks_f[i]), float(lam_of_k[i]),
        {int(k): float(l) for k, l in zip(ks_f, lam_of_k)},
        {int(k): float(e) for k, e in zip(ks_f, mse)},
        {int(k): float(c) for k, c in zip(ks_f, cv_of_k)},
    )


def select_k(data: Dataset, m: int, grid: TuningGrid, folds: FoldAssignment, kind: str,
             by: str = "train") -> tuple[int, float, dict]:
    """Rank minimizing full-sample training MSE at each rank's CV-chosen penalty.

    Ties go to the smaller rank. ``by="cv"`` instead ranks by the CV risk at
    ``lam_hat(k)``; that is a deliberate alternative, not the default rule.
    """
    state = _state(data, m, folds)
    ks = grid.ks(state.n, state.spectrum.r)
    table = state.cv_table(kind, ks, grid.lambdas)
    sel = _select_k_from_state(state, table, ks, grid.lambdas, kind, by)
    return sel.k_hat, sel.lam_hat, sel.train_mse_of_k


@dataclass
class TuningReport:
    """CV surface over (m, k, lam), profiled risks and the selected triple."""

    kind: str
    lambdas: np.ndarray
    ks_of_m: dict
    cv_risk: dict
    profiled_risk_of_m: dict
    lambda_hat_of_k: dict
    train_mse_of_k: dict
    selected: tuple
    fold_seed: int
    V: int
    select_k_by: str = "train"
    stopped_at: int | None = None
    states: dict = field(default_factory=dict, repr=False, compare=False)

    def rows(self):
        """(m, k, lambda, cv_risk, feasible) for every evaluated cell."""
        for m in sorted(self.cv_risk):
            table = self.cv_risk[m]
            for i, k in enumerate(self.ks_of_m[m]):
                for j, lam in enumerate(self.lambdas):
                    risk = table[i, j]
                    yield int(m), int(k), float(lam), float(risk), not math.isnan(risk)

    def summary(self) -> str:
        m, k, lam = self.selected
        prof = ", ".join(f"m={mm}: {self.profiled_risk_of_m[mm]!r}"
                         for mm in sorted(self.profiled_risk_of_m))
        return (f"selected kind={self.kind} m={m} k={k} lambda={lam!r} "
                f"folds={self.V} seed={self.fold_seed} profiled_cv_risk=[{prof}]")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("m,k,lambda,cv_risk,feasible\n")
            for m, k, lam, risk, ok in self.rows():
                fh.write(f"{m},{k},{lam!r},{risk!r},{int(ok)}\n")
            fh.write(f"# {self.summary()}\n")


def profile_m(data: Dataset, grid: TuningGrid, folds: FoldAssignment, kind: str,
              m_values=None, stop_rule: bool = True,
              select_k_by: str = "train") -> TuningReport:
    """Forward scan over interaction order with shared folds.

    ``data`` must already be scaled to [0, 1]. ``m_values`` defaults to
    ``1..min(d, grid.m_max)``. With ``stop_rule`` the scan ends at the first
    order whose profiled risk is not strictly lower than its predecessor's.
    """
    kind = canonical_kind(kind)
    m_cap = data.d if grid.m_max is None else min(grid.m_max, data.d)
    if m_values is None:
        m_values = range(1, m_cap + 1)
    m_values = [int(m) for m in m_values]
    lambdas = grid.lambdas
    tables, ks_of_m, profiled, states = {}, {}, {}, {}
    best_m, stopped_at = None, None
    for m in m_values:
        state = OrderState(data.X, data.Y, m, folds)
        ks = grid.ks(state.n, state.spectrum.r)
        table = state.cv_table(kind, ks, lambdas)
        states[m], tables[m], ks_of_m[m] = state, table, ks
        risk = float(np.nanmin(table)) if not np.all(np.isnan(table)) else math.inf
        profiled[m] = risk
        if best_m is None or risk < profiled[best_m]:
            best_m = m
        elif stop_rule:
            stopped_at = m
            break
    if best_m is None or math.isinf(profiled[best_m]):
        raise InfeasibleError("profile_m: no feasible (m, k, lambda) cell")
    sel = _select_k_from_state(states[best_m], tables[best_m], ks_of_m[best_m],
                               lambdas, kind, select_k_by)
    return TuningReport(
        kind=kind,
        lambdas=lambdas,
        ks_of_m=ks_of_m,
        cv_risk=tables,
        profiled_risk_of_m=profiled,
        lambda_hat_of_k=sel.lambda_hat_of_k,
        train_mse_of_k=sel.train_mse_of_k,
        selected=(best_m, sel.k_hat, sel.lam_hat),
        fold_seed=folds.seed,
        V=folds.V,
        select_k_by=select_k_by,
        stopped_at=stopped_at,
        states=states,
    )


def tune(data: Dataset, kind: str, grid: TuningGrid | None = None, seed: int = 0,
         m: int | None = None, select_k_by: str = "train",
         stop_rule: bool = True) -> tuple[FittedModel, TuningReport]:
    """Scale, cross-validate and refit on raw data; returns the model and its report.

    A fixed ``m`` skips the interaction-order scan.
    """
    grid = grid or TuningGrid()
    scaler: Scaler = scale_fit(data)
    scaled = scale_apply(scaler, data)
    folds = make_folds(data.n, grid.V, seed)
    report = profile_m(scaled, grid, folds, kind,
                       m_values=None if m is None else [m],
                       stop_rule=stop_rule, select_k_by=select_k_by)
    m_hat, k_hat, lam_hat = report.selected
    state = report.states[m_hat]
    model = fit_model(scaled.X, scaled.Y, scaler, kind, m_hat, k_hat, lam_hat,
                      feature_names=data.feature_names, spectrum=state.spectrum,
                      column_means=state.column_means)
    return model, report
