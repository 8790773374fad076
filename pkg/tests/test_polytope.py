import numpy as np
import pytest

from fmsm import instance as fi
from fmsm.errors import ConfigurationError, InfeasibleError
from fmsm.polytope import (
    ConvexCombination,
    PolytopeDescription,
    decompose,
    lp_maximize,
    min_inf_norm,
    solve_lp,
)
from helpers import modular_instance, ref_feasible_sets, ref_lp_max


def random_instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 13))
    kind = "uniform" if seed % 2 else "partition"
    return fi.gen_random(n, int(rng.integers(1, min(n, 4) + 1)), kind, "modular", seed), rng


def test_lp_examples():
    inst = modular_instance([3, 2, 1], 1, upper=[1])
    x, s = lp_maximize(PolytopeDescription.from_instance(inst), np.array([3.0, 2.0, 1.0]))
    assert s == frozenset({0})
    np.testing.assert_allclose(x, [1, 0, 0])
    gap = fi.gen_integrality_gap(2, 1)
    x, s = lp_maximize(PolytopeDescription.from_instance(gap), np.ones(gap.n))
    assert len(s) == gap.num_colors == 3 and gap.is_feasible(s)
    tight = modular_instance([1, 1, 1, 1], 4, colors=[0, 0, 1, 1], lower=[1, 2], upper=[1, 2])
    _, s = lp_maximize(PolytopeDescription.from_instance(tight), np.zeros(4))
    assert tight.is_feasible(s)


@pytest.mark.parametrize("seed", range(200))
def test_lp_matches_brute_force_and_scipy(seed):
    inst, rng = random_instance(seed)
    w = rng.normal(size=inst.n)
    desc = PolytopeDescription.from_instance(inst)
    x, s = lp_maximize(desc, w)
    assert np.all((np.abs(x) < 1e-9) | (np.abs(x - 1) < 1e-9))
    assert inst.is_feasible(s)
    best = max(sum(w[e] for e in f) for f in ref_feasible_sets(inst))
    assert float(w @ x) == pytest.approx(best, abs=1e-9)
    assert best == pytest.approx(ref_lp_max(inst, w), abs=1e-7)


def test_lp_infeasible_and_explicit():
    inst = modular_instance([1, 1], 1, colors=[0, 1], lower=[1, 1], upper=[1, 1])
    with pytest.raises(InfeasibleError):
        lp_maximize(PolytopeDescription.from_instance(inst), np.ones(2))
    explicit = inst.replace(matroid=fi.ExplicitSpec(((), (0,), (1,))))
    with pytest.raises(ConfigurationError):
        PolytopeDescription.from_instance(explicit)


def test_complement_membership():
    inst, _ = random_instance(11)
    desc = PolytopeDescription.from_instance(inst)
    comp = desc.complement()
    rng = np.random.default_rng(0)
    for s in ref_feasible_sets(inst)[:5]:
        x = np.zeros(inst.n)
        x[list(s)] = 1
        assert desc.contains(x) and comp.contains(1 - x)
    for _ in range(1000):
        x = rng.random(inst.n) * (rng.random() < 0.5) + (rng.random(inst.n) < 0.3) * 0.5
        x = np.clip(x, 0, 1)
        assert desc.contains(x) == comp.contains(1 - x)
    back = comp.complement()
    np.testing.assert_allclose(back.lo, desc.lo)
    np.testing.assert_allclose(back.hi, desc.hi)
    full = modular_instance([1, 1, 1], 3)
    assert PolytopeDescription.from_instance(full).complement().contains(np.ones(3))


@pytest.mark.parametrize("seed", range(30))
def test_decomposition_reproduces_point(seed):
    inst, rng = random_instance(seed)
    desc = PolytopeDescription.from_instance(inst)
    sets = ref_feasible_sets(inst)
    pick = rng.choice(len(sets), size=min(4, len(sets)), replace=False)
    w = rng.random(len(pick))
    x = ConvexCombination(inst.n, w / w.sum(), [sets[i] for i in pick]).point()
    cc = decompose(desc, x)
    cc.check(inst.is_feasible, 1e-9)
    np.testing.assert_allclose(cc.point(), x, atol=1e-9)
    counts = [sum(cc.point()[list(g)]) for g in inst.groups]
    assert all(lo - 1e-9 <= c <= hi + 1e-9 for c, lo, hi in zip(counts, inst.lower, inst.upper))


def test_convex_combination_merges_and_complements():
    cc = ConvexCombination(3, [0.25, 0.25, 0.5], [{0}, {0}, {1, 2}])
    assert len(cc) == 2
    assert list(cc.weights) == [0.5, 0.5]
    np.testing.assert_allclose(cc.complemented().point(), 1 - cc.point())
    with pytest.raises(ValueError):
        ConvexCombination(3, [0.5], [{0}]).check(lambda s: True)


def test_min_inf_norm_simple():
    inst = modular_instance([1] * 4, 4, colors=[0, 0, 0, 0], lower=[2], upper=[4])
    r, w = min_inf_norm(PolytopeDescription.from_instance(inst))
    assert r == pytest.approx(0.5, abs=1e-7)
    assert w.max() <= r + 1e-9
    single = modular_instance([1] * 2, 2, colors=[0, 0], lower=[2], upper=[2])
    r, _ = min_inf_norm(PolytopeDescription.from_instance(single))
    assert r == pytest.approx(1.0)


def test_solve_lp_respects_variable_caps():
    inst = modular_instance([1] * 4, 4, lower=[2], upper=[4])
    desc = PolytopeDescription.from_instance(inst)
    x = solve_lp(desc, np.ones(4), var_upper=np.full(4, 0.6))
    assert np.all(x <= 0.6 + 1e-9) and x.sum() == pytest.approx(2.4)


@pytest.mark.parametrize("seed", [10_019, 10_099])
def test_decomposition_of_bisection_witness(seed):
    # these witnesses sit within 2e-7 of faces they do not touch exactly
    inst = fi.gen_random(12 if seed == 10_019 else 9, 3, "partition", "graph_cut", seed)
    desc = PolytopeDescription.from_instance(inst)
    _, y = min_inf_norm(desc)
    cc = decompose(desc, y)
    cc.check(inst.is_feasible, 1e-9)
    np.testing.assert_allclose(cc.point(), y, atol=1e-5)
