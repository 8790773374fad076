"""Exact ground truth and instance statistics: brute-force optimum,
smallest infinity norm over the feasible polytope and its mirror image,
the integrality-gap value, and the excess ratio."""

from dataclasses import dataclass, field

import numpy as np

from fmsm import kernels
from fmsm.errors import ConfigurationError, InfeasibleError, UnsupportedSizeError
from fmsm.instance import ExplicitSpec, PartitionSpec, UniformSpec, gen_integrality_gap
from fmsm.matroids import from_mask
from fmsm.multilinear import exact_value
from fmsm.polytope import PolytopeDescription, min_inf_norm

BRUTE_FORCE_CAP = 20


def feasible_mask_table(inst):
    """Boolean array over all ``2**n`` bitmasks marking feasible sets."""
    n = inst.n
    ok = np.asarray(kernels.bounded_masks(n, [sorted(g) for g in inst.groups], inst.lower, inst.upper))
    spec = inst.matroid
    if isinstance(spec, UniformSpec):
        ok = ok & np.asarray(kernels.bounded_masks(n, [list(range(n))], [0], [spec.k]))
    elif isinstance(spec, PartitionSpec):
        blocks = [list(b) for b in spec.blocks]
        ok = ok & np.asarray(kernels.bounded_masks(n, blocks, [0] * len(blocks), list(spec.caps)))
    elif isinstance(spec, ExplicitSpec):
        family = np.zeros(1 << n, dtype=bool)
        family[[int(m) for m in inst.matroid_oracle.family]] = True
        ok = ok & family
    return ok


def best_mask(table, feasible, tol=1e-12):
    """Feasible mask of largest value; ties go to the lexicographically
    smallest sorted element tuple."""
    idx = np.flatnonzero(feasible)
    if idx.size == 0:
        raise InfeasibleError("no feasible set")
    vals = table[idx]
    top = vals.max()
    cands = idx[vals >= top - tol]
    best = min((int(m) for m in cands), key=lambda m: sorted(from_mask(m)))
    return float(top), best


def brute_force_opt(inst, max_n=None):
    """``(OPT, argmax set)`` by enumerating every subset.

    The default cap is ``n <= 20``; ``max_n`` raises it for a single call.
    """
    cap = BRUTE_FORCE_CAP if max_n is None else max_n
    if inst.n > cap:
        raise UnsupportedSizeError(f"brute force limited to n <= {cap} (got {inst.n})")
    table = inst.objective_oracle().value_table()
    value, mask = best_mask(table, feasible_mask_table(inst))
    return value, from_mask(mask)


def brute_force_matroids(oracle, matroids, ground=None):
    """Best set independent in every matroid (and inside ``ground``)."""
    n = oracle.n
    if n > BRUTE_FORCE_CAP:
        raise UnsupportedSizeError(f"brute force limited to n <= {BRUTE_FORCE_CAP}")
    gmask = (1 << n) - 1 if ground is None else sum(1 << e for e in ground)
    ok = np.array(
        [(m & ~gmask) == 0 and all(mt.indep(m) for mt in matroids) for m in range(1 << n)], dtype=bool
    )
    value, mask = best_mask(oracle.value_table(), ok)
    return value, from_mask(mask)


# ---------------------------------------------------------------------------
# smallest infinity norm


@dataclass
class NormReport:
    r_direct: float
    r_complement: float
    witness_direct: np.ndarray = field(repr=False)
    witness_complement: np.ndarray = field(repr=False)
    method: str

    @property
    def r(self):
        return min(self.r_direct, self.r_complement)

    def to_dict(self):
        return {
            "method": self.method,
            "r": self.r,
            "r_direct": self.r_direct,
            "r_complement": self.r_complement,
            "witness_direct": [float(v) for v in self.witness_direct],
            "witness_complement": [float(v) for v in self.witness_complement],
        }


def min_inf_norm_uniform(inst):
    """Closed form for a uniform matroid.

    Colors are sorted by ``lower_c / |V_c|`` (ties by color index).  With
    ``t`` the last position whose ratio can be spread over all earlier colors
    within the budget ``k``, the direct norm is the largest ratio and the
    mirrored norm is ``1 - min(tau, min_{c <= t} upper_c / |V_c|)``.
    """
    if not isinstance(inst.matroid, UniformSpec):
        raise ConfigurationError("closed form requires a uniform matroid")
    k = inst.matroid.k
    sizes = np.array(inst.group_sizes, dtype=float)
    lower = np.array(inst.lower, dtype=float)
    upper = np.array(inst.upper, dtype=float)
    ratio = lower / sizes
    order = sorted(range(inst.num_colors), key=lambda c: (ratio[c], c))
    t = 0
    for p in range(1, len(order) + 1):
        head = order[:p]
        tail = order[p:]
        if ratio[order[p - 1]] * sizes[head].sum() + lower[tail].sum() <= k + 1e-12:
            t = p
    if t == 0:
        raise InfeasibleError("no fair set fits in the uniform matroid")
    head, tail = order[:t], order[t:]
    tau = (k - lower[tail].sum()) / sizes[head].sum()
    level = min(tau, float(min(upper[c] / sizes[c] for c in head)))
    colors = np.asarray(inst.colors)
    direct = ratio[colors]
    fill = ratio.copy()
    # colors whose lower bound needs more than the common level keep their ratio
    fill[head] = np.maximum(level, ratio[head])
    mirrored = 1.0 - fill[colors]
    return NormReport(float(ratio.max()), float(1.0 - level), direct, mirrored, "closed_form_uniform")


def min_inf_norm_lp(inst, tol=1e-7):
    """Both norms by bisection on the coordinate cap, one LP per step."""
    desc = PolytopeDescription.from_instance(inst)
    r_d, w_d = min_inf_norm(desc, tol)
    r_c, w_c = min_inf_norm(desc.complement(), tol)
    return NormReport(r_d, r_c, w_d, w_c, "lp")


def norm_report(inst):
    if isinstance(inst.matroid, UniformSpec):
        return min_inf_norm_uniform(inst)
    return min_inf_norm_lp(inst)


def excess_ratio(inst):
    """``1 - max_c lower_c / |V_c|``."""
    return 1.0 - max(lo / s for lo, s in zip(inst.lower, inst.group_sizes))


# ---------------------------------------------------------------------------
# integrality gap


def gap_point(t, s):
    """Average of the ``t`` perfect matchings: odd edges ``1/t``, even edges ``1 - 1/t``."""
    L = 2 * s + 1
    x = np.empty(t * L)
    for i in range(t):
        for j in range(1, L + 1):
            x[i * L + j - 1] = 1.0 / t if j % 2 else 1.0 - 1.0 / t
    return x


def gap_ratio(t, s, verify_limit=16):
    """Extension value at the averaged point, ``t (1 - (1 - 1/t)^(s+1))``.

    For instances with at most ``verify_limit`` edges the value is also
    recomputed by exact enumeration.
    """
    if not (isinstance(t, int) and t >= 2 and isinstance(s, int) and s >= 1):
        raise ValueError("need integers t >= 2 and s >= 1")
    value = t * (1.0 - (1.0 - 1.0 / t) ** (s + 1))
    if t * (2 * s + 1) <= verify_limit:
        enumerated = gap_ratio_enumerated(t, s)
        if abs(enumerated - value) > 1e-9:
            raise ArithmeticError(f"closed form {value} disagrees with enumeration {enumerated}")
    return value


def gap_ratio_enumerated(t, s):
    inst = gen_integrality_gap(t, s)
    return exact_value(inst.objective_oracle(), gap_point(t, s))
