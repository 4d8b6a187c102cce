import numpy as np
import pytest

import monoproj


def test_pava_pools_violators():
    out = monoproj.pava([3.0, 1.0, 2.0])
    assert np.allclose(out, [2.0, 2.0, 2.0])
    out = monoproj.pava([3.0, 2.0, 1.0], weights=[1.0, 1.0, 2.0])
    assert np.allclose(out, 7.0 / 4.0)


def test_pava_matches_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        v = rng.normal(size=rng.integers(1, 12))
        w = rng.uniform(0.1, 3.0, size=v.size)
        assert np.max(np.abs(np.subtract(monoproj.pava(v, w), monoproj.minmax_oracle(v, w)))) < 1e-10


def test_surface_hand_case():
    r = monoproj.project_surface(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert r["converged"]
    assert np.allclose(r["values"], [[1 / 3, 1 / 3], [1 / 3, 1.0]], atol=1e-6)
    assert np.allclose(monoproj.upper_set_oracle(np.array([[1.0, 0.0], [0.0, 1.0]])), r["values"], atol=1e-6)


def test_bad_input_raises():
    with pytest.raises(ValueError):
        monoproj.pava([1.0, float("nan")])
    with pytest.raises(ValueError):
        monoproj.simulate_curve("nope")


def test_simulate_and_fit_curve():
    d = monoproj.simulate_curve("linear", n=30, sigma=0.3, seed=4)
    assert d["x"].shape == (30, 1)
    f = monoproj.fit(d["x"], d["y"], iters=400, burnin=150, seed=2)
    assert f["retained_draws"] == 250
    assert np.all(np.diff(f["mean"]) >= 0)
    assert np.all(f["lower"] <= f["mean"]) and np.all(f["mean"] <= f["upper"])
    again = monoproj.fit(d["x"], d["y"], iters=400, burnin=150, seed=2, jobs=2)
    assert np.array_equal(again["mean"], f["mean"])


def test_probit_surface_in_unit_interval():
    d = monoproj.simulate_surface("additive", m1=6, m2=6, binary=True, trials=4, offset=-1.0, seed=5)
    f = monoproj.fit(d["x"], d["y"], model="probit", trials=d["trials"], iters=300, burnin=100)
    assert f["lower"].min() >= 0.0 and f["upper"].max() <= 1.0


def test_cli_in_process():
    code, out, _ = monoproj.run_cli(["simulate", "--truth", "flat", "--n", "5", "--seed", "1"])
    assert code == 0
    assert out.splitlines()[0] == "x,y"
    code, _, err = monoproj.run_cli(["benchmark"])
    assert code == 2
