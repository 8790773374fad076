import json

import pytest

from fmsm import instance as fi
from fmsm.errors import GenerationError, ValidationError
from fmsm.objectives import is_submodular
from helpers import ref_feasible_sets


def uniform(colors, lower, upper, k):
    n = len(colors)
    return fi.Instance(n, tuple(colors), tuple(lower), tuple(upper), fi.UniformSpec(k), fi.ModularSpec((1.0,) * n))


def test_feasibility_examples():
    assert fi.feasibility_check(uniform([0, 0, 1, 1], [1, 1], [1, 2], 2))
    assert not fi.feasibility_check(uniform([0, 1], [1, 1], [1, 1], 1))
    part = fi.Instance(4, (0,) * 4, (3,), (3,), fi.PartitionSpec(((0, 1), (2, 3)), (1, 1)), fi.ModularSpec((1.0,) * 4))
    assert not fi.feasibility_check(part)


@pytest.mark.parametrize("seed", range(40))
def test_feasibility_matches_enumeration(seed):
    import numpy as np

    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 10))
    C = int(rng.integers(1, 4))
    colors = tuple(int(c) for c in rng.integers(C, size=n))
    C = max(colors) + 1
    colors = tuple(sorted(set(colors)).index(c) for c in colors)
    C = len(set(colors))
    sizes = [colors.count(c) for c in range(C)]
    upper = tuple(int(rng.integers(0, s + 1)) for s in sizes)
    lower = tuple(int(rng.integers(0, u + 1)) for u in upper)
    if seed % 2:
        matroid = fi.UniformSpec(int(rng.integers(0, n + 1)))
    else:
        labels = rng.integers(0, 3, size=n)
        blocks = tuple(tuple(e for e in range(n) if labels[e] == b) for b in range(3) if (labels == b).any())
        matroid = fi.PartitionSpec(blocks, tuple(int(rng.integers(0, len(b) + 1)) for b in blocks))
    inst = fi.Instance(n, colors, lower, upper, matroid, fi.ModularSpec((1.0,) * n))
    fi.validate(inst)
    assert fi.feasibility_check(inst) == bool(ref_feasible_sets(inst))
    w = fi.feasible_witness(inst)
    if w is not None:
        assert inst.is_feasible(w)


def test_validation_errors_name_the_field():
    bad = uniform([0, 0, 1], [2, 0], [1, 1], 2)
    with pytest.raises(ValidationError) as err:
        fi.validate(bad)
    assert "lower" in str(err.value) or "upper" in str(err.value)
    with pytest.raises(ValidationError):
        fi.validate(uniform([0, 0, 1], [0, 0], [3, 1], 2))
    with pytest.raises(ValidationError):
        fi.loads(json.dumps({"n": 1, "colors": [0], "lower": [0], "upper": [1], "matroid": {"kind": "uniform", "k": 1}, "objective": {"kind": "modular", "weights": [1]}, "extra": 1}))
    with pytest.raises(ValidationError):
        fi.loads("{not json")


def test_explicit_matroid_axioms_checked():
    good = fi.Instance(3, (0, 0, 0), (0,), (2,), fi.ExplicitSpec(((), (0,), (1,), (2,), (0, 1), (0, 2))), fi.ModularSpec((1.0,) * 3))
    fi.validate(good)
    bad = good.replace(matroid=fi.ExplicitSpec(((), (0,), (1,), (2,), (0, 1))))
    with pytest.raises(ValidationError):
        fi.validate(bad)


def test_gap_instance_shapes():
    small = fi.gen_integrality_gap(2, 1)
    assert small.n == 6
    fams = ref_feasible_sets(small)
    assert len(fams) == 2
    assert max(small.objective_oracle().value(s) for s in fams) == 1
    big = fi.gen_integrality_gap(3, 3)
    assert big.n == 21 and big.num_colors == 10
    assert big.matroid_oracle.rank == 10
    assert fi.feasibility_check(big)
    for t, s in [(2, 2), (3, 1), (4, 2)]:
        assert fi.feasibility_check(fi.gen_integrality_gap(t, s))
    with pytest.raises(ValueError):
        fi.gen_integrality_gap(1, 1)
    with pytest.raises(ValueError):
        fi.gen_integrality_gap(2, 0)


def test_gen_random_is_deterministic_and_feasible():
    a = fi.gen_random(10, 2, "uniform", "coverage", 7)
    b = fi.gen_random(10, 2, "uniform", "coverage", 7)
    assert a == b
    assert fi.feasibility_check(fi.gen_random(12, 3, "partition", "graph_cut", 1))
    with pytest.raises(ValueError):
        fi.gen_random(0, 1)


def test_generation_error_when_retries_run_out(monkeypatch):
    monkeypatch.setattr(fi, "feasibility_check", lambda inst: False)
    with pytest.raises(GenerationError):
        fi.gen_random(5, 2, seed=0, max_retries=3)


@pytest.mark.parametrize("matroid", fi.MATROID_KINDS)
@pytest.mark.parametrize("objective", fi.OBJECTIVE_KINDS)
def test_json_round_trip(matroid, objective, tmp_path):
    inst = fi.gen_random(9, 3, matroid, objective, seed=5)
    assert fi.loads(fi.dumps(inst)) == inst
    path = tmp_path / "i.json"
    fi.save(inst, path)
    assert fi.load(path) == inst
    assert is_submodular(inst.objective_oracle())


def test_round_trip_special_families():
    for inst in (fi.gen_integrality_gap(3, 2), fi.gen_welfare(3, 2, [0, 1, 1], seed=1)):
        assert fi.loads(fi.dumps(inst)) == inst
