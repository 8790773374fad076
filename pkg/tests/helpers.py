"""Independent reference computations used as test oracles.

Nothing here calls the package's own enumeration or LP code: feasibility
is checked from the raw instance fields and optima come from plain loops or
scipy.
"""

from itertools import combinations

import numpy as np

from fmsm.instance import (
    CoverageSpec,
    ExplicitSpec,
    GraphCutSpec,
    Instance,
    ModularSpec,
    PartitionSpec,
    UniformSpec,
)


def subsets(n):
    for size in range(n + 1):
        yield from combinations(range(n), size)


def ref_independent(inst, s):
    spec = inst.matroid
    if isinstance(spec, UniformSpec):
        return len(s) <= spec.k
    if isinstance(spec, PartitionSpec):
        return all(len(set(s) & set(b)) <= c for b, c in zip(spec.blocks, spec.caps))
    if isinstance(spec, ExplicitSpec):
        return frozenset(s) in {frozenset(t) for t in spec.independent_sets}
    raise TypeError(spec)


def ref_fair(inst, s):
    counts = [0] * len(inst.lower)
    for e in s:
        counts[inst.colors[e]] += 1
    return all(lo <= c <= hi for c, lo, hi in zip(counts, inst.lower, inst.upper))


def ref_feasible_sets(inst):
    return [frozenset(s) for s in subsets(inst.n) if ref_independent(inst, s) and ref_fair(inst, s)]


def ref_opt(inst):
    oracle = inst.objective_oracle()
    return max(oracle.value(s) for s in ref_feasible_sets(inst))


def ref_multilinear(values, x):
    """``sum_S f(S) prod x_i prod (1 - x_j)`` with ``values`` a dict or callable."""
    n = len(x)
    total = 0.0
    for s in subsets(n):
        p = 1.0
        for i in range(n):
            p *= x[i] if i in s else 1.0 - x[i]
        total += p * values(frozenset(s))
    return total


def ref_lp_max(inst, w):
    from scipy.optimize import linprog

    n = inst.n
    rows, ub = [], []
    for c in range(len(inst.lower)):
        a = np.array([1.0 if inst.colors[e] == c else 0.0 for e in range(n)])
        rows += [a, -a]
        ub += [inst.upper[c], -inst.lower[c]]
    spec = inst.matroid
    if isinstance(spec, UniformSpec):
        rows.append(np.ones(n))
        ub.append(spec.k)
    else:
        for b, cap in zip(spec.blocks, spec.caps):
            a = np.zeros(n)
            a[list(b)] = 1.0
            rows.append(a)
            ub.append(cap)
    res = linprog(-np.asarray(w), A_ub=np.array(rows), b_ub=np.array(ub), bounds=[(0, 1)] * n, method="highs")
    assert res.status == 0
    return -res.fun


def modular_instance(weights, k, colors=None, lower=None, upper=None):
    n = len(weights)
    colors = tuple(colors or [0] * n)
    num = max(colors) + 1
    lower = tuple(lower or [0] * num)
    upper = tuple(upper or [sum(1 for c in colors if c == j) for j in range(num)])
    return Instance(n, colors, lower, upper, UniformSpec(k), ModularSpec(tuple(float(v) for v in weights)))


def cycle_cut_instance(n=4):
    edges = tuple((i, (i + 1) % n, 1.0) for i in range(n))
    return Instance(n, (0,) * n, (0,), (n,), UniformSpec(n), GraphCutSpec(edges))


def small_coverage(colors, lower, upper, k, covered_by, universe):
    return Instance(
        len(colors), tuple(colors), tuple(lower), tuple(upper), UniformSpec(k),
        CoverageSpec(universe, tuple(tuple(c) for c in covered_by), (1.0,) * universe),
    )
