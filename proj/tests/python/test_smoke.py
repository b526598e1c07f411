"""End-to-end checks of the Python bindings."""

import numpy as np
import pytest

import dbmd


def planted_data(seed=0, sigma=0.05):
    w = dbmd.gen_basis(1.2, 8, 2, 4)
    h = dbmd.gen_h_dirichlet(4, 80, np.full(4, 0.08), seed)
    rng = np.random.default_rng(seed)
    x = w @ h + sigma * rng.standard_normal((w.shape[0], h.shape[1]))
    labels = np.argmax(h, axis=0)
    return x, labels


def test_version():
    assert dbmd.__version__ == "0.1.0"


def test_soft_threshold():
    x = np.array([[3.0, -0.5], [0.2, -4.0]])
    out = dbmd.soft_threshold(x, 1.0)
    assert np.allclose(out, [[2.0, 0.0], [0.0, -3.0]])


def test_spectral_norm():
    a = np.diag([5.0, 2.0, 1.0])
    assert dbmd.spectral_norm(a) == pytest.approx(5.0, rel=1e-6)


def test_generators():
    w = dbmd.gen_basis(1.5, 20, 2, 10)
    assert w.shape == (182, 10)
    assert np.count_nonzero(w[:, 0]) == 20

    h = dbmd.gen_h_bernoulli(5, 40, 0.3, 7)
    assert h.shape == (5, 40)
    assert np.allclose(h.sum(axis=0), 1.0)
    assert np.array_equal(h, dbmd.gen_h_bernoulli(5, 40, 0.3, 7))


def test_variance_ratio_theory():
    assert dbmd.variance_ratio_theoretical([1.0, 4.0]) == pytest.approx(0.64)
    assert dbmd.variance_ratio_theoretical([2.0, 2.0]) == pytest.approx(1.0)


def test_empirical_variance_ratio():
    res = dbmd.empirical_variance_ratio(
        "admm",
        sigma=[1.0, 2.0],
        reps=4,
        rank=2,
        cols_per_shard=12,
        p=0.4,
        rho=30.0,
        w_tol=1e-4,
        max_w_iters=1500,
    )
    assert res["theoretical"] == pytest.approx(0.64)
    assert res["reps_used"] == 4
    assert 0.0 < res["empirical"] < 2.0


def test_hungarian_accuracy():
    assert dbmd.hungarian_accuracy([1, 1, 0], [0, 0, 1]) == 1.0
    assert dbmd.hungarian_accuracy([0, 0, 0, 1], [0, 0, 1, 1]) == 0.75


def test_update_h_stays_on_simplex():
    x, _ = planted_data(seed=3)
    w = dbmd.gen_basis(1.2, 8, 2, 4)
    h0 = np.full((4, x.shape[1]), 0.25)
    h1 = dbmd.update_h(x, w, h0)
    assert h1.shape == h0.shape
    assert np.allclose(h1.sum(axis=0), 1.0, atol=1e-9)
    assert h1.min() >= 1e-8 - 1e-12
    before = 0.5 * np.linalg.norm(x - w @ h0) ** 2
    after = 0.5 * np.linalg.norm(x - w @ h1) ** 2
    assert after <= before


@pytest.mark.parametrize("solver", ["agd", "admm", "cease"])
def test_fit_recovers_planted_clusters(solver):
    x, labels = planted_data(seed=1)
    res = dbmd.fit(
        x,
        workers=2,
        solver=solver,
        rank=4,
        rho=40.0,
        gamma=0.001,
        seed=5,
        w_tol=1e-3,
        outer_tol=1e-3,
        max_outer=60,
    )
    assert res["converged"]
    objective = res["objective"]
    assert objective[-1] < objective[0]
    diffs = np.diff(objective)
    assert np.all(diffs <= 1e-6 * np.abs(objective[:-1]))
    assert res["w"].shape == (x.shape[0], 4)
    acc = dbmd.hungarian_accuracy(res["labels"], labels.tolist())
    assert acc > 0.9
    assert res["comm"]["total_entries"] > 0


def test_fit_deterministic():
    x, _ = planted_data(seed=2)
    a = dbmd.fit(x, workers=3, solver="admm", rank=4, seed=9, max_outer=10)
    b = dbmd.fit(x, workers=3, solver="admm", rank=4, seed=9, max_outer=10)
    assert np.array_equal(a["w"], b["w"])
    assert a["objective"] == b["objective"]
    c = dbmd.fit(x, workers=3, solver="admm", rank=4, seed=10, max_outer=10)
    assert not np.array_equal(a["w"], c["w"])


def test_fit_restarts_never_hurt():
    x, _ = planted_data(seed=6)
    kwargs = dict(workers=3, solver="admm", rank=4, lambda_=0.02, seed=3,
                  w_tol=1e-3, outer_tol=1e-3, max_outer=40)
    single = dbmd.fit(x, **kwargs)
    multi = dbmd.fit(x, restarts=3, **kwargs)
    assert multi["objective"][-1] <= single["objective"][-1]
    assert multi["comm"]["total_entries"] > single["comm"]["total_entries"]


def test_fit_rejects_bad_args():
    x, _ = planted_data(seed=4)
    with pytest.raises(ValueError):
        dbmd.fit(x, workers=0)
    with pytest.raises(ValueError):
        dbmd.fit(x, workers=2, solver="nope")
    with pytest.raises(ValueError):
        dbmd.fit(x, workers=2, rank=0)
    with pytest.raises(ValueError):
        dbmd.fit(x, workers=2, rank=4, restarts=0)
