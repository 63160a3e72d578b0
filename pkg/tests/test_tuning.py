import numpy as np
import pytest

from pcha.data import Dataset, make_folds
from pcha.design import build_design
from pcha.errors import InfeasibleError
from pcha.tuning import (DEFAULT_LAMBDAS, TuningGrid, cv_risk, default_k_grid, profile_m,
                         select_k, select_lambda, tune)


def linear_1d(n=40, seed=0, noise=0.1):
    r = np.random.default_rng(seed)
    X = r.random((n, 1))
    return Dataset(X, 2.0 * X[:, 0] + noise * r.standard_normal(n))


def additive_2d(n=100, seed=0):
    r = np.random.default_rng(seed)
    X = r.random((n, 2))
    return Dataset(X, np.sin(2 * np.pi * X[:, 0]) + X[:, 1] + 0.1 * r.standard_normal(n))


def test_default_grids():
    assert len(DEFAULT_LAMBDAS) == 25
    np.testing.assert_allclose(DEFAULT_LAMBDAS[[0, -1]], [1e-9, 10.0])
    np.testing.assert_array_equal(default_k_grid(50, 49), np.arange(1, 50))
    big = default_k_grid(1000, 999)
    assert len(big) == 64 and big[0] == 1 and big[-1] == 999 and np.all(np.diff(big) > 0)


def test_constant_y_risk_zero():
    data = Dataset(np.random.default_rng(1).random((30, 2)), np.full(30, 3.5))
    folds = make_folds(30, 5, 0)
    for k, lam in [(1, 1e-6), (5, 1e-2)]:
        for kind in ("pchal", "pchar"):
            assert abs(cv_risk(data, 2, k, lam, folds, kind)) < 1e-10


def test_huge_penalty_gives_fold_mean_risk():
    data = linear_1d()
    folds = make_folds(data.n, 5, 3)
    expect = np.mean([np.mean((data.Y[folds.test_index(v)] - data.Y[folds.train_index(v)].mean())
                               ** 2) for v in range(1, 6)])
    assert cv_risk(data, 1, 5, 1e3, folds, "pchal") == pytest.approx(expect, rel=1e-12)


def _manual_cv(data, k, lam, folds):
    """CV risk through explicit centered designs and a dense SVD (independent of the kernel)."""
    errs = []
    for v in range(1, folds.V + 1):
        tr, te = folds.train_index(v), folds.test_index(v)
        H = build_design(data.X[tr], data.X[tr], 1).astype(float)
        Hn = build_design(data.X[tr], data.X[te], 1).astype(float)
        mu = H.mean(axis=0)
        _, s, Vt = np.linalg.svd(H - mu, full_matrices=False)
        y = data.Y[tr]
        Z = (H - mu) @ Vt[:k].T
        w = Z.T @ (y - y.mean())
        beta = np.sign(w) * np.maximum(np.abs(w) - len(tr) * lam, 0) / s[:k] ** 2
        pred = y.mean() + (Hn - mu) @ Vt[:k].T @ beta
        errs.append(np.mean((data.Y[te] - pred) ** 2))
    return float(np.mean(errs))


def test_cv_risk_matches_independent_recomputation():
    data = linear_1d()
    folds = make_folds(data.n, 5, 11)
    risks = []
    for k in range(1, 16):
        got = cv_risk(data, 1, k, 1e-4, folds, "pchal")
        assert got == pytest.approx(_manual_cv(data, k, 1e-4, folds), rel=1e-9)
        risks.append(got)
    assert risks[0] > min(risks)


def test_select_lambda_rules():
    data = linear_1d()
    folds = make_folds(data.n, 5, 0)
    lam, _ = select_lambda(data, 1, 3, TuningGrid(lambda_grid=(1e-3,)), folds, "pchal")
    assert lam == 1e-3
    # both penalties kill every component: equal risk, the larger one wins
    lam, _ = select_lambda(data, 1, 3, TuningGrid(lambda_grid=(1e4, 1e5)), folds, "pchal")
    assert lam == 1e5


def test_select_lambda_stable_across_fold_seeds():
    data = linear_1d(n=120, seed=5)
    grid = TuningGrid()
    picks = [select_lambda(data, 1, 10, grid, make_folds(data.n, 5, s), "pchal")[0]
             for s in (1, 2)]
    idx = [int(np.argmin(np.abs(np.log(grid.lambdas / p)))) for p in picks]
    risks = [select_lambda(data, 1, 10, grid, make_folds(data.n, 5, s), "pchal")[1]
             for s in (1, 2)]
    assert abs(idx[0] - idx[1]) <= 1 or abs(risks[0] - risks[1]) < 0.1 * max(risks)


def test_select_k_rules():
    data = linear_1d()
    folds = make_folds(data.n, 5, 0)
    k_hat, _, mse = select_k(data, 1, TuningGrid(k_candidates=(20,)), folds, "pchal")
    assert k_hat == 20 and list(mse) == [20]
    r = np.random.default_rng(4)
    noise = Dataset(r.random((60, 1)), r.standard_normal(60))
    grid = TuningGrid(lambda_grid=tuple(np.logspace(-1, 1, 9)))
    k_hat, lam, _ = select_k(noise, 1, grid, make_folds(60, 5, 0), "pchal")
    assert k_hat <= 5


def test_train_mse_nonincreasing_in_k():
    data = linear_1d(n=30)
    folds = make_folds(30, 5, 0)
    grid = TuningGrid(lambda_grid=(1e-12,))
    _, _, mse = select_k(data, 1, grid, folds, "pchal")
    vals = [mse[k] for k in sorted(mse)]
    assert np.all(np.diff(vals) <= 1e-12)


def test_infeasible_cells_never_selected():
    r = np.random.default_rng(2)
    X = r.integers(0, 5, size=(30, 1)) / 4.0
    data = Dataset(X, X[:, 0] + 0.01 * r.standard_normal(30))
    grid = TuningGrid(k_candidates=tuple(range(1, 11)))
    rep = profile_m(data, grid, make_folds(30, 5, 0), "pchal")
    table = rep.cv_risk[1]
    assert np.isnan(table[5:]).all() and not np.isnan(table[:4]).any()
    assert rep.selected[1] <= 4
    with pytest.raises(InfeasibleError):
        profile_m(data, TuningGrid(k_candidates=(8, 9)), make_folds(30, 5, 0), "pchal")


def test_profile_d1_and_csv(tmp_path):
    data = linear_1d()
    rep = profile_m(data, TuningGrid(k_candidates=(1, 2, 3)), make_folds(data.n, 5, 0), "pchar")
    assert rep.selected[0] == 1
    p = tmp_path / "r.csv"
    rep.to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "m,k,lambda,cv_risk,feasible"
    assert len(lines) == 2 + 3 * 25 and lines[-1].startswith("# selected")


def test_additive_prefers_m1():
    hits = 0
    for s in range(5):
        data = additive_2d(seed=s)
        rep = profile_m(data, TuningGrid(), make_folds(data.n, 5, s), "pchal")
        hits += rep.selected[0] == 1
    assert hits >= 3


def test_joint_equals_profiled():
    r = np.random.default_rng(8)
    X = r.random((60, 3))
    data = Dataset(X, X[:, 0] * X[:, 1] + X[:, 2] + 0.05 * r.standard_normal(60))
    rep = profile_m(data, TuningGrid(), make_folds(60, 5, 0), "pchal", stop_rule=False)
    assert set(rep.cv_risk) == {1, 2, 3}
    best = min((np.nanmin(t), m) for m, t in rep.cv_risk.items())
    assert rep.selected[0] == best[1]
    for m, t in rep.cv_risk.items():
        assert rep.profiled_risk_of_m[m] == np.nanmin(t)


def test_stop_rule_halts_scan():
    data = additive_2d(seed=0)
    rep = profile_m(data, TuningGrid(), make_folds(data.n, 5, 0), "pchal")
    ms = sorted(rep.profiled_risk_of_m)
    if rep.stopped_at is not None:
        assert ms[-1] == rep.stopped_at
        assert rep.profiled_risk_of_m[ms[-1]] >= rep.profiled_risk_of_m[ms[-2]]


def test_tune_deterministic_and_consistent():
    data = additive_2d(n=80, seed=3)
    m1, r1 = tune(data, "pchal", seed=9)
    m2, r2 = tune(data, "pchal", seed=9)
    assert r1.summary() == r2.summary()
    np.testing.assert_array_equal(m1.beta, m2.beta)
    from pcha.estimators import predict
    np.testing.assert_allclose(predict(m1, data.X), m1.fitted_values(), atol=1e-8)
    m_hat, k_hat, lam_hat = r1.selected
    assert r1.lambda_hat_of_k[k_hat] == lam_hat
    assert r1.train_mse_of_k[k_hat] == min(r1.train_mse_of_k.values())


def test_fixed_m_and_select_by_cv():
    r = np.random.default_rng(0)
    X = r.random((50, 3))
    data = Dataset(X, X.sum(axis=1))
    _, rep = tune(data, "pchar", m=1)
    assert set(rep.cv_risk) == {1}
    _, rep = tune(data, "pchar", m=1, select_k_by="cv")
    assert rep.select_k_by == "cv"
