import math

import numpy as np
import pytest

import sigsde


def test_shuffle_and_words():
    s = sigsde.shuffle((1, 2), (3, 4))
    assert len(s) == 6 and sum(s.values()) == 6
    assert sigsde.shuffle("1", "1") == {(1, 1): 2}
    assert sigsde.enumerate_words(2, 2) == [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)]
    assert sigsde.q_bound(3, 1) == 4


def test_signature_shuffle_identity():
    rng = np.random.default_rng(0)
    x = np.cumsum(rng.normal(size=(8, 2)), axis=0)
    s = sigsde.signature(x, 3, add_time=True)
    assert s.alphabet_size == 3
    assert s[()] == 1.0
    for i in range(3):
        for j in range(3):
            assert abs(s[(i,)] * s[(j,)] - s[(i, j)] - s[(j, i)]) < 1e-10
    assert s["0"] == pytest.approx(1.0)
    inv = sigsde.signature(x[::-1].copy(), 3, times=np.linspace(0, 1, 8), add_time=False)
    assert inv.level == 3


def test_tensor_algebra():
    a = sigsde.Tensor(2, 3)
    a[(1,)] = 0.4
    a[(0, 1)] = -0.2
    e = sigsde.trunc_exp(a) @ sigsde.trunc_exp(-1.0 * a)
    assert np.allclose(e.coeffs, sigsde.Tensor.unit(2, 3).coeffs, atol=1e-12)


def test_expected_signature():
    e = sigsde.expected_signature_bm_time(1, 0.2, 4)
    assert e[(1, 1)] == pytest.approx(0.1)
    assert e[(1, 1, 0)] == pytest.approx(0.01)
    mean, se = sigsde.mc_expected_signature(1, 0.2, 2, 4000, 0.01, seed=3)
    assert abs(mean[(1, 1)] - 0.1) < 4 * se[(1, 1)]


def test_experiment1_pipeline():
    exp = sigsde.bundled_experiment(1)
    assert exp.theta0 == [-1.0, 0.0, 4.0]
    assert exp.word_sets["W2"] == ["1", "1.1", "0.1.1"]
    path = sigsde.simulate(exp)
    assert path.shape == (201, 2)
    assert np.allclose(path[:, 0], np.linspace(0, 0.2, 201))

    # theta2 = 0 makes theta3 invisible at r = 3, so move off that line
    theta = [-1.0, 0.5, 4.0]
    polys = sigsde.moment_polys(exp, exp.word_sets["W1"])
    truth = [p(theta) for p in polys]
    roots = sigsde.solve_system(polys, truth, seed=1)
    best = min(max(abs(a - b) for a, b in zip(r[0], theta)) for r in roots)
    assert best < 1e-8
    assert all(r[1] <= 1e-9 for r in roots)


def test_run_experiment_small():
    exp = sigsde.bundled_experiment(1)
    exp.trials = 2
    exp.N = 200
    rep = sigsde.run_experiment(exp)
    assert [s["name"] for s in rep["sets"]] == ["W1", "W2"]
    assert len(rep["sets"][0]["trials"]) == 2
    assert all(math.isfinite(v) for v in rep["sets"][0]["mean"])


def test_config_errors():
    with pytest.raises(ValueError, match="model.m"):
        sigsde.parse_config('{"model": {"n": 1}}')


def test_nonident_demo():
    d, a, b = sigsde.nonident_demo(0.3, 0.001, 0)
    assert d <= 0.1
    assert a.shape == b.shape == (301, 4)
