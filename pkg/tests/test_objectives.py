
import numpy as np
import pytest

from fmsm.instance import gen_random, gen_welfare
from fmsm.multilinear import exact_value
from fmsm.objectives import (
    CoverageOracle,
    FacilityLocationOracle,
    GraphCutOracle,
    ModularOracle,
    Part,
    SubmodularOracle,
    complement,
    decomposable_oracle,
    dummy_extend,
    is_monotone,
    is_nonnegative,
    is_submodular,
)
from helpers import subsets


def diminishing_returns(oracle):
    """Direct check of f(Y+e) - f(Y) >= f(X+e) - f(X) for all Y <= X, e outside X."""
    n = oracle.n
    f = {frozenset(s): oracle.value(s) for s in subsets(n)}
    for x in f:
        for y in f:
            if not y <= x:
                continue
            for e in range(n):
                if e in x:
                    continue
                if f[y | {e}] - f[y] < f[x | {e}] - f[x] - 1e-9:
                    return False
    return True


def test_value_examples():
    cov = CoverageOracle(2, [[0], [0, 1]])
    assert cov.value([0, 1]) == 2
    cut = GraphCutOracle(2, [(0, 1, 3.0)])
    assert cut.value([0]) == 3 and cut.value([0, 1]) == 0
    mod = ModularOracle([3, 2, 1])
    assert mod.value([0, 2]) == 4
    with pytest.raises(ValueError):
        mod.value([3])


def test_complement_examples():
    mod = ModularOracle([3, 2, 1])
    comp = complement(mod)
    assert comp.value([0]) == 3
    assert not comp.monotone
    assert complement(comp) is mod
    cut = GraphCutOracle(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)])
    np.testing.assert_allclose(complement(cut).value_table(), cut.value_table())


def test_complement_table_matches_pointwise():
    cov = CoverageOracle(4, [[0], [1, 2], [2, 3], [0, 3]])
    comp = complement(cov)
    for s in subsets(4):
        rest = [e for e in range(4) if e not in s]
        assert comp.value(s) == cov.value(rest)
        assert comp.value_table()[sum(1 << e for e in s)] == cov.value(rest)


def test_dummy_extension():
    cov = CoverageOracle(3, [[0], [1], [0, 1]])
    ext = dummy_extend(cov, [3, 4])
    assert ext.n == 5 and ext.monotone
    assert ext.value([3, 4]) == cov.value([])
    for s in subsets(3):
        assert ext.value(list(s) + [3, 4]) == cov.value(s)
    np.testing.assert_allclose(ext.value_table()[[m for m in range(32)]], [ext.value([e for e in range(5) if m >> e & 1]) for m in range(32)])
    with pytest.raises(ValueError):
        dummy_extend(cov, [2])
    dec = decomposable_oracle(2, [Part((0,), ModularOracle([1.0]))], [Part((1,), ModularOracle([2.0]))])
    assert dummy_extend(dec, [2]).decomposition is dec.decomposition


@pytest.mark.parametrize("kind", ["coverage", "graph_cut", "facility_location", "modular"])
def test_generated_objectives_are_submodular(kind):
    for seed in range(3):
        inst = gen_random(8, 2, "uniform", kind, seed)
        o = inst.objective_oracle()
        assert is_submodular(o) and is_nonnegative(o)
        assert is_submodular(complement(o))
        assert is_submodular(dummy_extend(o, [8, 9]))
        if kind != "graph_cut":
            assert is_monotone(o)


class Squared(SubmodularOracle):
    n = 4

    def _eval(self, mask):
        return float(mask.bit_count() ** 2)


def test_checker_agrees_with_direct_definition():
    rng = np.random.default_rng(4)
    for _ in range(5):
        o = CoverageOracle(5, [list(rng.choice(5, size=2, replace=False)) for _ in range(6)])
        assert diminishing_returns(o) and is_submodular(o)
    sq = Squared()
    assert not is_submodular(sq) and not diminishing_returns(sq)


def test_complement_identity_on_extension():
    rng = np.random.default_rng(1)
    inst = gen_random(9, 2, "uniform", "graph_cut", 3)
    f = inst.objective_oracle()
    g = complement(f)
    for _ in range(100):
        x = rng.random(9)
        assert exact_value(g, x) == pytest.approx(exact_value(f, 1 - x), abs=1e-12)


def test_welfare_splits_by_color():
    inst = gen_welfare(3, 3, [0, 0, 1], seed=2)
    f = inst.objective_oracle()
    dec = f.decomposition
    assert dec is not None and len(dec.color_parts) == 2
    for s in subsets(inst.n):
        mask = sum(1 << e for e in s)
        assert f.value(s) == pytest.approx(dec.value_mask(mask))
    for part in dec.color_parts:
        assert is_monotone(part.oracle) and is_submodular(part.oracle)


def test_call_counter():
    o = FacilityLocationOracle([[1.0, 2.0], [3.0, 0.5]])
    assert o.calls == 0
    o.value([0])
    o.value([0, 1])
    assert o.calls == 2
    o.value_table()
    assert o.calls == 6
    o.reset_calls()
    assert o.calls == 0
