"""Property-based checks of the invariants each module promises."""

import math

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from fmsm import instance as fi
from fmsm import solvers as sv
from fmsm.analysis import brute_force_opt
from fmsm.matroids import ExtendableFairMatroid, PartitionMatroid, max_cardinality_intersection
from fmsm.multilinear import exact_value
from fmsm.objectives import complement, is_nonnegative, is_submodular
from fmsm.polytope import ConvexCombination, PolytopeDescription, lp_maximize
from fmsm.rounding import swap_round_intersection, swap_round_matroid
from helpers import ref_feasible_sets, subsets

@st.composite
def random_instances(draw, max_n=10, objectives=fi.OBJECTIVE_KINDS, matroids=fi.MATROID_KINDS):
    n = draw(st.integers(2, max_n))
    c = draw(st.integers(1, min(3, n)))
    return fi.gen_random(n, c, draw(st.sampled_from(matroids)), draw(st.sampled_from(objectives)), draw(st.integers(0, 10_000)))


@given(random_instances())
def test_serialization_round_trip(inst):
    assert fi.loads(fi.dumps(inst)) == inst


@given(random_instances(max_n=9))
def test_objectives_nonnegative_submodular(inst):
    f = inst.objective_oracle()
    assert is_nonnegative(f) and is_submodular(f) and is_submodular(complement(f))


@st.composite
def partitions(draw, n):
    labels = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    blocks = [[e for e in range(n) if labels[e] == b] for b in sorted(set(labels))]
    caps = [draw(st.integers(0, len(b))) for b in blocks]
    return PartitionMatroid(n, blocks, caps)


@given(st.data())
def test_intersection_is_maximum(data):
    n = data.draw(st.integers(1, 9))
    m1, m2 = data.draw(partitions(n)), data.draw(partitions(n))
    s = max_cardinality_intersection(m1, m2)
    assert m1.is_independent(s) and m2.is_independent(s)
    best = max(len(t) for t in subsets(n) if m1.is_independent(t) and m2.is_independent(t))
    assert len(s) == best


@given(st.data())
def test_extendable_fair_membership(data):
    n = data.draw(st.integers(1, 8))
    colors = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    C = max(colors) + 1
    sizes = [colors.count(c) for c in range(C)]
    upper = [data.draw(st.integers(0, s)) for s in sizes]
    lower = [data.draw(st.integers(0, u)) for u in upper]
    k = data.draw(st.integers(sum(lower), n))
    m = ExtendableFairMatroid(colors, lower, upper, k)
    fair = [frozenset(t) for t in subsets(n) if len(t) <= k and all(
        lo <= sum(1 for e in t if colors[e] == c) <= hi for c, lo, hi in zip(range(C), lower, upper))]
    assume(fair)
    for t in subsets(n):
        assert m.is_independent(t) == any(frozenset(t) <= f for f in fair)


@given(random_instances(objectives=("modular",)), st.integers(0, 1000))
def test_lp_vertex_is_best_feasible_set(inst, seed):
    w = np.random.default_rng(seed).normal(size=inst.n)
    x, s = lp_maximize(PolytopeDescription.from_instance(inst), w)
    assert inst.is_feasible(s)
    assert np.all(np.minimum(np.abs(x), np.abs(x - 1)) <= 1e-9)
    best = max(sum(w[e] for e in f) for f in ref_feasible_sets(inst))
    assert abs(float(w @ x) - best) <= 1e-9


@given(random_instances(), st.integers(0, 1000))
def test_combination_point_respects_color_bounds(inst, seed):
    sets = ref_feasible_sets(inst)
    rng = np.random.default_rng(seed)
    w = rng.random(min(5, len(sets)))
    pick = rng.choice(len(sets), size=len(w), replace=False)
    cc = ConvexCombination(inst.n, w / w.sum(), [sets[i] for i in pick]).check(inst.is_feasible, 1e-12)
    x = cc.point()
    for g, lo, hi in zip(inst.groups, inst.lower, inst.upper):
        assert lo - 1e-9 <= x[list(g)].sum() <= hi + 1e-9
    assert PolytopeDescription.from_instance(inst).contains(x, 1e-9)
    s = swap_round_matroid(cc, inst.matroid_oracle, seed)
    assert inst.matroid_oracle.is_independent(s)
    t = swap_round_intersection(cc, inst, seed)
    assert inst.is_feasible(t)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=12), st.lists(st.integers(0, 2), min_size=12, max_size=12), st.integers(0, 2**32 - 1))
def test_hartley_sizes(x, colors, seed):
    colors = colors[: len(x)]
    x = np.array(x)
    groups = sv.hartley_sample(x, colors, seed)
    total = 0
    for c, g in enumerate(groups):
        mass = sum(x[e] for e in range(len(x)) if colors[e] == c)
        assert math.floor(mass + 1e-9) <= len(g) <= math.ceil(mass - 1e-9)
        assert all(colors[e] == c and x[e] > 0 for e in g)
        total += len(g)
    assert math.floor(x.sum() + 1e-9) <= total <= math.ceil(x.sum() - 1e-9)


@given(random_instances(max_n=9, objectives=("graph_cut",)), st.floats(0, 0.5), st.integers(0, 1000))
def test_two_pass_bounds(inst, beta, seed):
    rep = sv.two_pass_nonmonotone(inst, beta, seed=seed)
    assert rep.independent
    assert rep.counts == inst.color_counts(rep.solution)
    for c, cnt in enumerate(rep.counts):
        assert math.floor(beta * inst.lower[c]) <= cnt <= inst.upper[c]


@given(random_instances(max_n=9, matroids=("uniform",)), st.integers(0, 1000))
def test_uniform_and_decomposable_outputs_feasible(inst, seed):
    assert inst.is_feasible(sv.uniform_nonmonotone(inst, seed=seed).solution)
    assert inst.is_feasible(sv.decomposable_solve(inst, seed=seed).solution)


@given(random_instances(max_n=8))
def test_brute_force_optimum_is_feasible_and_maximal(inst):
    opt, best = brute_force_opt(inst)
    f = inst.objective_oracle()
    assert inst.is_feasible(best) and f.value(best) == opt
    assert all(f.value(s) <= opt + 1e-12 for s in ref_feasible_sets(inst))


@given(random_instances(max_n=8), st.integers(0, 1000))
def test_complement_extension_identity(inst, seed):
    f = inst.objective_oracle()
    x = np.random.default_rng(seed).random(inst.n)
    assert abs(exact_value(complement(f), x) - exact_value(f, 1 - x)) <= 1e-9
