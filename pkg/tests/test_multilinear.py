import numpy as np
import pytest

from fmsm.instance import gen_random
from fmsm.multilinear import MultilinearEstimator, default_samples, exact_value, indicator
from fmsm.objectives import CoverageOracle, ModularOracle, complement
from helpers import ref_multilinear


def test_examples():
    mod = ModularOracle([3.0, 2.0, 1.0])
    assert exact_value(mod, [0.5] * 3) == pytest.approx(3.0)
    cov = CoverageOracle(2, [[0], [0, 1]])
    assert exact_value(cov, [0.5, 0.5]) == pytest.approx(1.25)
    assert exact_value(cov, indicator(2, [1])) == cov.value([1])
    np.testing.assert_allclose(MultilinearEstimator(mod).grad(np.random.default_rng(0).random(3)), [3, 2, 1])


def test_exact_matches_enumeration():
    inst = gen_random(7, 2, "uniform", "facility_location", 2)
    f = inst.objective_oracle()
    x = np.random.default_rng(1).random(7)
    assert exact_value(f, x) == pytest.approx(ref_multilinear(f.value, x), abs=1e-10)


@pytest.mark.parametrize("kind", ["coverage", "graph_cut", "facility_location"])
def test_gradient_matches_finite_differences(kind):
    f = gen_random(8, 2, "uniform", kind, 3).objective_oracle()
    est = MultilinearEstimator(f, "exact")
    x = np.random.default_rng(2).uniform(0.1, 0.9, 8)
    g = est.grad(x)
    h = 1e-5
    for i in range(8):
        up, dn = x.copy(), x.copy()
        up[i] += h
        dn[i] -= h
        assert g[i] == pytest.approx((est.eval(up) - est.eval(dn)) / (2 * h), abs=1e-4)
    mono = gen_random(8, 2, "uniform", "coverage", 3).objective_oracle()
    assert np.all(MultilinearEstimator(mono).grad(np.ones(8)) >= 0)


def test_sampled_is_unbiased_and_deterministic():
    f = gen_random(10, 2, "uniform", "coverage", 4).objective_oracle()
    x = np.random.default_rng(5).random(10)
    est = MultilinearEstimator(f, "sampled", num_samples=100_000, seed=9)
    vals = est.sample_values(x)
    exact = exact_value(f, x)
    assert abs(vals.mean() - exact) <= 3 * vals.std() / np.sqrt(len(vals))
    again = MultilinearEstimator(f, "sampled", num_samples=1000, seed=9)
    assert again.eval(x, iteration=3) == again.eval(x, iteration=3)
    g1 = MultilinearEstimator(f, "sampled", num_samples=500, seed=1).grad(x, 2)
    g2 = MultilinearEstimator(f, "sampled", num_samples=500, seed=1).grad(x, 2)
    np.testing.assert_array_equal(g1, g2)


def test_affine_in_each_coordinate():
    f = gen_random(9, 2, "uniform", "graph_cut", 6).objective_oracle()
    x = np.random.default_rng(7).random(9)
    for i in range(9):
        lo, mid, hi = x.copy(), x.copy(), x.copy()
        lo[i], mid[i], hi[i] = 0.0, 0.5, 1.0
        assert exact_value(f, mid) == pytest.approx((exact_value(f, lo) + exact_value(f, hi)) / 2, abs=1e-12)


def test_complement_identity():
    f = gen_random(8, 2, "uniform", "coverage", 8).objective_oracle()
    x = np.random.default_rng(3).random(8)
    assert exact_value(complement(f), x) == pytest.approx(exact_value(f, 1 - x), abs=1e-12)


def test_argument_checks():
    f = ModularOracle([1.0, 1.0])
    with pytest.raises(ValueError):
        exact_value(f, [1.2, 0.0])
    with pytest.raises(ValueError):
        MultilinearEstimator(f, "bogus")
    assert default_samples(10) == int(np.ceil(64 * 10 * np.log(11)))
