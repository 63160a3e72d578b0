import math

import numpy as np
import pytest

from pcha.errors import DataError
from pcha.simulation import (D7_FREQ, D7_WEIGHT, DGPS, DgpSpec, benchmark_replicate,
                             eigen_overlay, g1, g6, g9_noise_sd, g10, g_interaction3, gen_dgp,
                             interaction_replicate, run_interaction_experiment,
                             run_mse_benchmark, saw, sigmoid)
from pcha.tuning import TuningGrid


def test_saw_and_sigmoid_conventions():
    np.testing.assert_allclose(saw([0.0, 0.25, 0.49, 0.5, 0.75, 1.0]),
                               [0.0, 0.5, 0.98, -1.0, -0.5, 0.0], atol=1e-15)
    assert sigmoid(0.0) == 0.5
    assert saw(np.linspace(-3, 3, 101)).min() >= -1 and saw(np.linspace(-3, 3, 101)).max() < 1


def test_signal_values():
    # d1 at 0: 0.35*0 + sin 0 + 0.4 cos 0 + 0.2 saw(0) - 0.3 sigma(-7.8)
    assert g1(np.zeros((1, 1)))[0] == pytest.approx(0.4 - 0.3 / (1 + math.exp(7.8)), abs=1e-15)
    assert g6(np.full((1, 6), 0.9))[0] == pytest.approx(1.3, abs=1e-15)
    assert g_interaction3(np.ones((1, 3)))[0] == pytest.approx(0.85, abs=1e-15)
    # x = 0.5 everywhere: parity term sum floor(1.5)=4 is even, cosines cancel, tails vanish
    assert g10(np.full((1, 10), 0.5))[0] == pytest.approx(-0.5, abs=1e-15)
    assert g9_noise_sd(np.ones((1, 9)))[0] == pytest.approx(0.4)


def test_d7_constants():
    np.testing.assert_allclose(D7_FREQ, [7, 8, 9, 10, 11, 12, 13])
    np.testing.assert_allclose(D7_WEIGHT, [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4])


def test_registry_dimensions():
    for j in range(1, 11):
        assert DGPS[f"d{j}"].d == j
    assert DGPS["interaction3"].low == -1.0 and DGPS["interaction3"].noise_sd(np.zeros((2, 3)))[0] == 0.03


def test_gen_dgp_properties():
    spec = DgpSpec("d3", 50, 40, seed=7, replicate=2)
    tr1, te1 = gen_dgp(spec)
    tr2, te2 = gen_dgp(spec)
    np.testing.assert_array_equal(tr1.X, tr2.X)
    np.testing.assert_array_equal(te1.Y, te2.Y)
    assert tr1.X.shape == (50, 3) and te1.X.shape == (40, 3)
    assert not np.array_equal(tr1.X[:40], te1.X)
    other, _ = gen_dgp(DgpSpec("d3", 50, 40, seed=7, replicate=3))
    assert not np.array_equal(tr1.X, other.X)
    clean, _ = gen_dgp(DgpSpec("d3", 50, 40, seed=7, replicate=2, noise=False))
    np.testing.assert_array_equal(clean.X, tr1.X)
    from pcha.simulation import g3
    np.testing.assert_array_equal(clean.Y, g3(clean.X))
    inter, _ = gen_dgp(DgpSpec("interaction3", 30, 5, seed=0))
    assert inter.X.min() >= -1 and inter.X.max() <= 1 and inter.X.min() < 0
    with pytest.raises(DataError):
        gen_dgp(DgpSpec("d11", 5, 5, 0))


def test_constant_dgp_mse():
    assert benchmark_replicate("const", 50, 0, 0, n_test=100)["pchal"] < 1e-10


def test_interaction_determinism():
    grid = TuningGrid(k_candidates=tuple(range(1, 30)))
    a = interaction_replicate(60, 0, 3, n_test=300, grid=grid)
    b = interaction_replicate(60, 0, 3, n_test=300, grid=grid)
    assert a[0] == b[0] and a[1] == b[1] and a[2] == b[2]
    oracle, cv = run_interaction_experiment((60,), 1, 3, n_test=300, grid=grid)
    for res in (oracle, cv):
        row = res.table["n=60"]
        assert sorted(row.tolist()) == [0.0, 0.0, 1.0]
    assert cv.table["n=60"][a[0] - 1] == 1.0 and oracle.table["n=60"][a[1] - 1] == 1.0


def test_mse_runner_layout(tmp_path):
    res = run_mse_benchmark((1, 2), (40,), 2, seed=1, n_test=200)
    assert set(res.table) == {"pchal", "pchar"}
    assert res.table_columns == ("d=1 n=40", "d=2 n=40")
    assert len(res.records) == 2 * 2 * 2
    res.write_table(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "row,d=1 n=40,d=2 n=40"
    with pytest.raises(DataError):
        run_mse_benchmark((11,), (40,), 1)


def test_eigen_overlay_shapes():
    idx, num, ref = eigen_overlay(n=40, d=2, n_components=6, seed=0)
    assert num.shape == ref.shape == (40, 6)
    np.testing.assert_allclose(num, ref, atol=1e-6)
