"""Synthetic benchmarks: data-generating processes and experiment runners.

Randomness is derived from one experiment seed through
``SeedSequence(seed, spawn_key=(...))`` keyed by DGP, sample size, replicate
and role, so any single replicate can be regenerated in isolation.

Conventions for the helper functions the DGP formulas use:

* ``saw(t) = 2 (t - floor(t + 1/2))``, a period-1 sawtooth in [-1, 1);
* ``sigmoid(t) = 1 / (1 + exp(-t))``;
* ``linspace(a, b)`` has 7 points including both ends (the d7 weights).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, make_folds, scale_apply, scale_fit
from .errors import DataError
from .estimators import canonical_kind
from .kernel import KernelConfig, center_cross, cross_gram, gram
from .spectral import eig_sym, sine_eigensystem
from .tuning import OrderState, TuningGrid, _select_k_from_state, coef_path, profile_m

ROLE_TRAIN, ROLE_TEST, ROLE_FOLDS = 0, 1, 2


def saw(t):
    t = np.asarray(t, dtype=np.float64)
    return 2.0 * (t - np.floor(t + 0.5))


def sigmoid(t):
    return 1.0 / (1.0 + np.exp(-np.asarray(t, dtype=np.float64)))


def _pos(t):
    return np.maximum(t, 0.0)


def g1(X):
    x = X[:, 0]
    return (0.35 * x + np.sin(2 * np.pi * x**2) + 0.4 * np.cos(4 * np.pi * x)
            + 0.2 * saw(7 * x) - 0.3 * sigmoid(12 * (x - 0.65)))


def g2(X):
    x1, x2 = X[:, 0], X[:, 1]
    return (np.sin(np.pi * x1 * x2) + 0.5 * (x2 - 0.5) ** 2
            + 0.3 * np.cos(3 * np.pi * (x1 + x2)) - 0.2 * np.sin(2 * np.pi * (x1 - x2)))


def g3(X):
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    bump = np.exp(-35 * ((x1 - 0.7) ** 2 + (x2 - 0.3) ** 2 + (x3 - 0.5) ** 2))
    return (0.6 * np.sin(2 * np.pi * x1) + 0.6 * np.cos(2 * np.pi * x2)
            + 0.6 * np.sin(2 * np.pi * x3**2) + 0.4 * x2 * x3 + 0.5 * bump)


def g4(X):
    x1, x2, x3, x4 = X[:, 0], X[:, 1], X[:, 2], X[:, 3]
    return (np.abs(x1 - 0.5) + 0.7 * _pos(x2 - 0.3) + 0.5 * np.abs(x3 - 0.7)
            + 0.6 * _pos(0.6 - x4) + 0.3 * (x1 > 0.6) - 0.25 * (x2 < 0.2)
            + 0.2 * ((x3 > 0.8) & (x4 < 0.4)))


def g5(X):
    mbar = X[:, :5].mean(axis=1)
    return mbar**1.7 + 0.4 * np.sin(2 * np.pi * mbar) + 0.2 * (X[:, 0] - 0.5) * (X[:, 4] - 0.5)


def g6(X):
    x = X
    return (1.0 * (x[:, :6].sum(axis=1) > 3.2)
            + 0.6 * ((x[:, 0] > 0.6) & (x[:, 1] < 0.4))
            + 0.4 * ((x[:, 2] > 0.7) & (x[:, 3] < 0.3))
            + 0.3 * (x[:, 4] + x[:, 5] > 1.1))


D7_FREQ = np.linspace(7, 13, 7)
D7_WEIGHT = np.linspace(1, 0.4, 7)


def g7(X):
    main = (D7_WEIGHT * np.sin(D7_FREQ * np.pi * X[:, :7])).sum(axis=1)
    return (main + 0.2 * (X[:, 0] - 0.5) * (X[:, 2] - 0.5)
            - 0.2 * (X[:, 4] - 0.5) * (X[:, 6] - 0.5))


def g8(X):
    x = X[:, :8]
    return (np.exp(-30 * ((x - 0.3) ** 2).sum(axis=1))
            - 0.8 * np.exp(-30 * ((x - 0.7) ** 2).sum(axis=1))
            + 0.3 * np.sin(2 * np.pi * x.mean(axis=1))
            + 0.2 * np.cos(2 * np.pi * (x[:, 0] + x[:, 7])))


def g9(X):
    x = X[:, :9]
    return (0.8 * np.sin(np.pi * x[:, 0] * x[:, 1]) + 0.25 * (x[:, 2] - 0.5) * (x[:, 8] - 0.5)
            + 0.3 * x[:, 6] * x[:, 7] + 0.6 * np.cos(2 * np.pi * x.mean(axis=1)))


def g9_noise_sd(X):
    return 0.10 + 0.30 * (X[:, :9] ** 2).mean(axis=1)


def g10(X):
    parity = np.floor(3 * X[:, :4]).sum(axis=1) % 2 - 0.5
    j = np.arange(1, 11)
    waves = np.cos(2 * np.pi * j * X[:, :10]).sum(axis=1) / 10
    tail = 0.2 * _pos(X[:, 4] - 0.6) + 0.2 * _pos(0.4 - X[:, 5]) + 0.2 * (X[:, 8] > 0.75)
    return parity + 0.6 * waves + tail


INTERACTION_BETA = np.array([1.2, -1.0, 0.8])


def g_interaction3(X):
    return X @ INTERACTION_BETA + 0.3 * (X[:, 0] * X[:, 1] - 1.5 * X[:, 1] * X[:, 2])


def g_const(X):
    return np.full(X.shape[0], 0.5)


@dataclass(frozen=True)
class Dgp:
    code: int
    d: int
    signal: object
    noise_sd: object
    low: float = 0.0
    high: float = 1.0


def _const_sd(s):
    return lambda X: np.full(X.shape[0], s)


DGPS = {
    "d1": Dgp(1, 1, g1, _const_sd(0.05)),
    "d2": Dgp(2, 2, g2, _const_sd(0.12)),
    "d3": Dgp(3, 3, g3, _const_sd(0.16)),
    "d4": Dgp(4, 4, g4, _const_sd(0.18)),
    "d5": Dgp(5, 5, g5, _const_sd(0.16)),
    "d6": Dgp(6, 6, g6, _const_sd(0.15)),
    "d7": Dgp(7, 7, g7, _const_sd(0.20)),
    "d8": Dgp(8, 8, g8, _const_sd(0.18)),
    "d9": Dgp(9, 9, g9, g9_noise_sd),
    "d10": Dgp(10, 10, g10, _const_sd(0.18)),
    "interaction3": Dgp(11, 3, g_interaction3, _const_sd(0.03), low=-1.0, high=1.0),
    "const": Dgp(12, 2, g_const, _const_sd(0.0)),
}


@dataclass(frozen=True)
class DgpSpec:
    """One draw of a DGP: id, sizes, experiment seed and replicate index."""

    id: str
    n_train: int
    n_test: int
    seed: int
    replicate: int = 0
    noise: bool = True


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``key`` (e.g. DGP code, n, replicate, role)."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def derived_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(int(seed), spawn_key=tuple(key)).generate_state(1)[0])


def _draw(dgp: Dgp, n, rng, noise):
    X = rng.uniform(dgp.low, dgp.high, size=(n, dgp.d))
    f = dgp.signal(X)
    eps = rng.standard_normal(n) * dgp.noise_sd(X) if noise else np.zeros(n)
    return Dataset(X, f + eps, tuple(f"x{j + 1}" for j in range(dgp.d)), "y")


def get_dgp(dgp_id: str) -> Dgp:
    try:
        return DGPS[dgp_id]
    except KeyError:
        raise DataError(f"gen_dgp: unknown DGP id {dgp_id!r}; known: {sorted(DGPS)}") from None


def gen_dgp(spec: DgpSpec) -> tuple[Dataset, Dataset]:
    """Independent training and test samples for ``spec``."""
    dgp = get_dgp(spec.id)
    key = (dgp.code, spec.n_train, spec.replicate)
    train = _draw(dgp, spec.n_train, stream(spec.seed, *key, ROLE_TRAIN), spec.noise)
    test = _draw(dgp, spec.n_test, stream(spec.seed, *key, ROLE_TEST), spec.noise)
    return train, test


@dataclass
class ExperimentResult:
    """Per-replicate records plus an aggregate table.

    ``records`` rows follow ``columns``; ``table`` maps a row label to a vector
    aligned with ``table_columns``.
    """

    name: str
    columns: tuple
    records: list
    table_columns: tuple
    table: dict
    seed: int
    meta: dict = field(default_factory=dict)

    def write_records(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for rec in self.records:
                w.writerow([_fmt(v) for v in rec])

    def write_table(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("row",) + tuple(self.table_columns))
            for label, values in self.table.items():
                w.writerow([label] + [_fmt(v) for v in values])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _test_scores(state: OrderState, X_test):
    cfg = KernelConfig(state.m)
    Kc = center_cross(cross_gram(X_test, state.X, cfg), state.column_means)
    spec = state.spectrum
    return Kc @ (spec.U / np.sqrt(spec.D))


def holdout_risk_table(state: OrderState, kind: str, ks, lambdas, X_test, Y_test,
                    scores=None) -> np.ndarray:
    """Held-out MSE of the full-sample fit for each (k, lam); X_test already scaled."""
    if scores is None:
        scores = _test_scores(state, X_test)
    ks = np.asarray(ks, dtype=np.int64)
    kmax = int(ks.max())
    B = coef_path(kind, state.spectrum.D[:kmax], state.w[:kmax], state.n, lambdas)
    out = np.empty((ks.size, len(lambdas)))
    for li in range(len(lambdas)):
        pred = state.y_mean + np.cumsum(scores[:, :kmax] * B[li], axis=1)[:, ks - 1]
        out[:, li] = np.mean((Y_test[:, None] - pred) ** 2, axis=0)
    return out


def interaction_replicate(n: int, replicate: int, seed: int, kind: str = "pchal",
                          n_test: int = 5000, grid: TuningGrid | None = None,
                          m_values=(1, 2, 3)):
    """CV-selected and oracle interaction order for one replicate.

    The oracle minimizes fresh-sample risk over every (k, lam) cell of each
    order; CV uses the forward scan with shared folds.
    """
    grid = grid or TuningGrid()
    train, test = gen_dgp(DgpSpec("interaction3", n, n_test, seed, replicate))
    scaler = scale_fit(train)
    tr = scale_apply(scaler, train)
    X_test = scaler.transform(test.X)
    folds = make_folds(n, grid.V, derived_seed(seed, 11, n, replicate, ROLE_FOLDS))
    report = profile_m(tr, grid, folds, kind, m_values=m_values, stop_rule=True)
    oracle_risk = {}
    for m in m_values:
        state = report.states.get(m) or OrderState(tr.X, tr.Y, m, folds)
        ks = grid.ks(state.n, state.spectrum.r)
        ks = ks[ks <= state.spectrum.r]
        oracle_risk[m] = float(holdout_risk_table(state, kind, ks, grid.lambdas,
                                               X_test, test.Y).min())
    m_oracle = min(m_values, key=lambda m: (oracle_risk[m], m))
    return report.selected[0], m_oracle, report.profiled_risk_of_m, oracle_risk


def run_interaction_experiment(ns=(100, 300, 800), reps: int = 20, seed: int = 0,
                               kind: str = "pchal", n_test: int = 5000,
                               grid: TuningGrid | None = None, progress=None):
    """Frequency with which each interaction order is chosen, by oracle and by CV.

    Returns ``(oracle, cv)`` results whose tables map ``n=<n>`` to the
    proportions of m = 1, 2, 3.
    """
    if reps < 1:
        raise DataError("run_interaction_experiment: reps must be >= 1")
    m_values = (1, 2, 3)
    cols = ("n", "replicate", "m_cv", "m_oracle",
            "cv_risk_m1", "cv_risk_m2", "cv_risk_m3",
            "oracle_risk_m1", "oracle_risk_m2", "oracle_risk_m3")
    records = []
    freq_cv, freq_or = {}, {}
    for n in ns:
        counts_cv = np.zeros(3)
        counts_or = np.zeros(3)
        for rep in range(reps):
            m_cv, m_or, cv_r, or_r = interaction_replicate(
                n, rep, seed, kind, n_test, grid, m_values)
            counts_cv[m_cv - 1] += 1
            counts_or[m_or - 1] += 1
            records.append((n, rep, m_cv, m_or)
                           + tuple(float(cv_r.get(m, np.nan)) for m in m_values)
                           + tuple(or_r[m] for m in m_values))
            if progress:
                progress(f"interaction n={n} rep={rep}: m_cv={m_cv} m_oracle={m_or}")
        freq_cv[f"n={n}"] = counts_cv / reps
        freq_or[f"n={n}"] = counts_or / reps
    mcols = tuple(f"m={m}" for m in m_values)
    meta = {"kind": canonical_kind(kind), "reps": reps, "n_test": n_test}
    oracle = ExperimentResult("interaction_oracle", cols, records, mcols, freq_or, seed, meta)
    cv = ExperimentResult("interaction_cv", cols, records, mcols, freq_cv, seed, meta)
    return oracle, cv


def benchmark_replicate(dgp_id: str, n: int, replicate: int, seed: int,
                        kinds=("pchal", "pchar"), n_test: int = 2000,
                        grid: TuningGrid | None = None, m: int | None = None) -> dict:
    """Test MSE of each estimator for one replicate, using the full interaction order."""
    grid = grid or TuningGrid()
    dgp = get_dgp(dgp_id)
    train, test = gen_dgp(DgpSpec(dgp_id, n, n_test, seed, replicate))
    scaler = scale_fit(train)
    tr = scale_apply(scaler, train)
    X_test = scaler.transform(test.X)
    folds = make_folds(n, grid.V, derived_seed(seed, dgp.code, n, replicate, ROLE_FOLDS))
    state = OrderState(tr.X, tr.Y, dgp.d if m is None else m, folds)
    ks = grid.ks(state.n, state.spectrum.r)
    scores = _test_scores(state, X_test)
    out = {}
    for kind in kinds:
        table = state.cv_table(kind, ks, grid.lambdas)
        sel = _select_k_from_state(state, table, ks, grid.lambdas, kind)
        risk = holdout_risk_table(state, kind, [sel.k_hat], [sel.lam_hat], X_test, test.Y,
                               scores=scores)
        out[kind] = float(risk[0, 0])
    return out


def run_mse_benchmark(dims=(1,), ns=(200,), reps: int = 5, seed: int = 0,
                      kinds=("pchal", "pchar"), n_test: int = 2000,
                      grid: TuningGrid | None = None, progress=None) -> ExperimentResult:
    """Mean test MSE per (method, d, n) over ``reps`` replicates of DGP ``d<d>``."""
    for d in dims:
        if not 1 <= int(d) <= 10:
            raise DataError(f"run_mse_benchmark: dimension {d} outside 1..10")
    records = []
    sums = {}
    for d in dims:
        for n in ns:
            for rep in range(reps):
                res = benchmark_replicate(f"d{d}", n, rep, seed, kinds, n_test, grid)
                for kind, mse in res.items():
                    records.append((kind, int(d), int(n), rep, mse))
                    sums.setdefault((kind, d, n), []).append(mse)
                if progress:
                    progress(f"mse d={d} n={n} rep={rep}: {res}")
    settings = [(d, n) for n in ns for d in dims]
    table_cols = tuple(f"d={d} n={n}" for d, n in settings)
    table = {kind: np.array([np.mean(sums[(kind, d, n)]) for d, n in settings])
             for kind in kinds}
    return ExperimentResult("mse", ("method", "d", "n", "replicate", "test_mse"),
                            records, table_cols, table, seed,
                            {"reps": reps, "n_test": n_test})


def eigen_overlay(n: int = 200, d: int = 1, n_components: int = 6, seed: int = 0):
    """Leading eigenvectors of the Gram of a totally ordered sample next to the sine vectors.

    Returns ``(index, numerical, closed_form)`` with the numerical vectors
    sign-aligned to the closed-form ones; rows follow the sorted sample.
    """
    rng = stream(seed, 99, n, d)
    X = np.sort(rng.uniform(size=(n, d)), axis=0)
    spec = eig_sym(gram(X, KernelConfig(d)).K.astype(np.float64))
    sine = sine_eigensystem(n, d)
    num = spec.U[:, :n_components]
    ref = sine.U[:, :n_components]
    num = num * np.sign(np.sum(num * ref, axis=0))
    return np.arange(1, n + 1), num, ref
