from itertools import permutations

import numpy as np
import pytest

from fmsm import instance as fi
from fmsm.analysis import (
    brute_force_opt,
    excess_ratio,
    gap_point,
    gap_ratio,
    gap_ratio_enumerated,
    min_inf_norm_lp,
    min_inf_norm_uniform,
)
from fmsm.errors import ConfigurationError, UnsupportedSizeError
from fmsm.polytope import PolytopeDescription
from helpers import modular_instance, ref_multilinear, ref_opt


def test_brute_force_examples():
    assert brute_force_opt(fi.gen_integrality_gap(2, 1))[0] == 1
    opt, best = brute_force_opt(modular_instance([3, 2, 1], 2, upper=[2]))
    assert opt == 5 and best == frozenset({0, 1})
    only = modular_instance([3, 2, 1], 3, colors=[0, 1, 1], lower=[1, 2], upper=[1, 2])
    assert brute_force_opt(only) == (6.0, frozenset({0, 1, 2}))
    with pytest.raises(UnsupportedSizeError):
        brute_force_opt(fi.gen_random(21, 2, seed=0))


@pytest.mark.parametrize("seed", range(25))
def test_brute_force_matches_reference(seed):
    kind = ("uniform", "partition")[seed % 2]
    obj = ("coverage", "graph_cut", "facility_location", "modular")[seed % 4]
    inst = fi.gen_random(9, 3, kind, obj, seed)
    opt, best = brute_force_opt(inst)
    assert opt == pytest.approx(ref_opt(inst))
    assert inst.is_feasible(best)


@pytest.mark.parametrize("t,s", [(2, 1), (2, 2), (3, 1), (2, 3)])
def test_gap_instances_have_unit_optimum(t, s):
    assert brute_force_opt(fi.gen_integrality_gap(t, s))[0] == 1


def test_closed_form_example():
    inst = fi.Instance(6, (0, 0, 0, 0, 1, 1), (1, 1), (2, 2), fi.UniformSpec(3), fi.ModularSpec((1.0,) * 6))
    rep = min_inf_norm_uniform(inst)
    assert rep.r_direct == pytest.approx(0.5)
    assert rep.r_complement == pytest.approx(0.5)
    assert rep.r == pytest.approx(0.5)
    lp = min_inf_norm_lp(inst)
    assert lp.r == pytest.approx(0.5, abs=1e-6)


def test_closed_form_trivial_cases():
    zero = modular_instance([1] * 5, 3, colors=[0, 0, 1, 1, 1], lower=[0, 0], upper=[2, 3])
    assert min_inf_norm_uniform(zero).r == 0
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(4, 12))
        colors = tuple(sorted(int(c) for c in rng.integers(3, size=n)))
        labels = sorted(set(colors))
        colors = tuple(labels.index(c) for c in colors)
        sizes = [colors.count(c) for c in range(len(labels))]
        k = int(rng.integers(1, n + 1))
        lower = tuple(int(np.floor(k * s / n)) for s in sizes)
        upper = tuple(int(np.ceil(k * s / n)) for s in sizes)
        inst = fi.Instance(n, colors, lower, upper, fi.UniformSpec(k), fi.ModularSpec((1.0,) * n))
        assert min_inf_norm_uniform(inst).r <= min(k / n, 1 - k / n) + 1e-12
    with pytest.raises(ConfigurationError):
        min_inf_norm_uniform(fi.gen_random(6, 2, "partition", "modular", 0))


def check_witness(inst, rep):
    desc = PolytopeDescription.from_instance(inst)
    assert desc.residual(rep.witness_direct) <= 1e-9
    assert desc.complement().residual(rep.witness_complement) <= 1e-9
    assert rep.witness_direct.max() == pytest.approx(rep.r_direct, abs=1e-9)
    assert rep.witness_complement.max() == pytest.approx(rep.r_complement, abs=1e-9)


@pytest.mark.parametrize("seed", range(100))
def test_closed_form_agrees_with_lp(seed):
    rng = np.random.default_rng(seed)
    inst = fi.gen_random(int(rng.integers(3, 11)), int(rng.integers(1, 4)), "uniform", "modular", seed)
    closed = min_inf_norm_uniform(inst)
    lp = min_inf_norm_lp(inst)
    assert closed.r_direct == pytest.approx(lp.r_direct, abs=1e-6)
    assert closed.r_complement == pytest.approx(lp.r_complement, abs=1e-6)
    check_witness(inst, closed)
    desc = PolytopeDescription.from_instance(inst)
    assert desc.residual(lp.witness_direct) <= 1e-9
    assert excess_ratio(inst) == pytest.approx(1 - closed.r_direct, abs=1e-12)


def test_tied_colors_are_order_invariant():
    base = dict(lower=(1, 1, 2), upper=(2, 2, 3))
    sizes = (3, 3, 4)
    values = set()
    for perm in permutations(range(3)):
        colors = tuple(c for c in perm for _ in range(sizes[c]))
        inst = fi.Instance(10, colors, base["lower"], base["upper"], fi.UniformSpec(5), fi.ModularSpec((1.0,) * 10))
        values.add(round(min_inf_norm_uniform(inst).r_complement, 12))
    assert len(values) == 1


@pytest.mark.parametrize("t", [2, 3, 4])
def test_gap_norm(t):
    inst = fi.gen_integrality_gap(t, 1)
    assert min_inf_norm_lp(inst).r == pytest.approx(1 - 1 / t, abs=1e-6)


def test_gap_ratio_values():
    assert gap_ratio(2, 1) == pytest.approx(1.5)
    assert gap_ratio(3, 3) == pytest.approx(65 / 27, abs=1e-12)
    assert gap_ratio_enumerated(3, 3) == pytest.approx(65 / 27, abs=1e-9)
    vals = [gap_ratio(t, t) for t in range(2, 6)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        gap_ratio(1, 1)


def test_gap_point_reference_evaluation():
    inst = fi.gen_integrality_gap(2, 1)
    f = inst.objective_oracle()
    x = gap_point(2, 1)
    assert PolytopeDescription.from_instance(inst).contains(x)
    assert ref_multilinear(f.value, x) == pytest.approx(gap_ratio(2, 1), abs=1e-12)


def test_excess_ratio_examples():
    inst = fi.Instance(6, (0, 0, 0, 0, 1, 1), (1, 1), (2, 2), fi.UniformSpec(3), fi.ModularSpec((1.0,) * 6))
    assert excess_ratio(inst) == 0.5
    assert excess_ratio(inst.replace(lower=(0, 0))) == 1.0
