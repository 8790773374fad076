"""Randomized swap rounding of convex combinations of sets.

Support sets are merged pairwise in decreasing weight order.  Each merge
repeatedly exchanges elements between the two sets, moving one of them
towards the other with probability proportional to the other's weight, so
the expected indicator vector never changes.
"""

from itertools import combinations

import numpy as np

from fmsm.errors import ConfigurationError
from fmsm.instance import UniformSpec
from fmsm.matroids import (
    DummyExtendedMatroid,
    ExtendableFairMatroid,
    TruncatedMatroid,
    equivalence_classes,
    from_mask,
    to_mask,
)


def _merge_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def _pad(masks, n, k):
    """Fill every mask up to ``k`` elements with dummies ``n, n+1, ...``."""
    out = []
    for m in masks:
        need = k - m.bit_count()
        out.append(m | (((1 << need) - 1) << n))
    return out


def _lowest(mask):
    return (mask & -mask).bit_length() - 1


def _merge_bases(b1, w1, b2, w2, matroid, rng):
    while b1 != b2:
        i = _lowest(b1 & ~b2)
        ibit = 1 << i
        rest = b2 & ~b1
        while rest:
            jbit = rest & -rest
            rest ^= jbit
            if matroid.indep((b1 ^ ibit) | jbit) and matroid.indep((b2 ^ jbit) | ibit):
                break
        else:
            raise ConfigurationError("no symmetric exchange found; support sets are not bases")
        if rng.random() < w1 / (w1 + w2):
            b2 = (b2 ^ jbit) | ibit
        else:
            b1 = (b1 ^ ibit) | jbit
    return b1


def swap_round_matroid(cc, matroid, seed=0):
    """Round a combination of independent sets to one independent set.

    Sets of unequal size are padded with dummy elements and merged as bases
    of the dummy-extended matroid truncated to the largest size.
    """
    masks = [to_mask(s) for s in cc.sets]
    for s, m in zip(cc.sets, masks):
        if not matroid.indep(m):
            raise ValueError(f"support set {sorted(s)} is not independent")
    n = matroid.n
    k = max(m.bit_count() for m in masks)
    if any(m.bit_count() != k for m in masks):
        masks = _pad(masks, n, k)
        matroid = TruncatedMatroid(DummyExtendedMatroid(matroid, k), k)
    current, weight = masks[0], cc.weights[0]
    for t in range(1, len(masks)):
        current = _merge_bases(current, weight, masks[t], cc.weights[t], matroid, _merge_rng(seed, t))
        weight += cc.weights[t]
    return from_mask(current & ((1 << n) - 1))


def _minimal_exchange(a, b, m1, m2):
    """Smallest ``A <= a - b``, ``B <= b - a`` of equal size such that both
    ``a - A + B`` and ``b - B + A`` are independent in both matroids."""
    left = sorted(from_mask(a & ~b))
    right = sorted(from_mask(b & ~a))
    for p in range(1, len(left) + 1):
        for A in combinations(left, p):
            amask = to_mask(A)
            a_rest = a & ~amask
            for B in combinations(right, p):
                bmask = to_mask(B)
                na = a_rest | bmask
                nb = (b & ~bmask) | amask
                if m1.indep(na) and m2.indep(na) and m1.indep(nb) and m2.indep(nb):
                    return amask, bmask
    raise ConfigurationError("no exchange between support sets")


def _merge_common(a, wa, b, wb, m1, m2, rng):
    while a != b:
        amask, bmask = _minimal_exchange(a, b, m1, m2)
        if rng.random() < wa / (wa + wb):
            b = (b & ~bmask) | amask
        else:
            a = (a & ~amask) | bmask
    return a


def decomposition_compatible(inst, oracle):
    """Whether ``oracle`` splits over the matroid classes and the color groups.

    A single color or a uniform matroid makes every objective qualify.
    """
    if inst.num_colors == 1 or isinstance(inst.matroid, UniformSpec):
        return True
    dec = getattr(oracle, "decomposition", None)
    if dec is None:
        return False
    return dec.compatible_with(equivalence_classes(inst.matroid_oracle), inst.groups)


class IntersectionRounder:
    """Swap rounding onto feasible sets for one instance.

    Support sets are padded to the largest size ``k`` with dummies; the
    merge runs in the dummy-extended matroid intersected with the matroid of
    sets extendable to a fair set of size ``k`` (dummies form an extra color
    with bounds ``[0, k]``).  Equal-size common independent sets of size
    ``k`` are bases of the latter, hence fair once dummies are removed.
    """

    def __init__(self, inst, cc, objective=None, force=False):
        if objective is not None and not force and not decomposition_compatible(inst, objective):
            raise ConfigurationError("objective does not decompose over the classes and colors")
        for s in cc.sets:
            if not inst.is_feasible(s):
                raise ValueError(f"support set {sorted(s)} is not feasible")
        self.n = inst.n
        self.cc = cc
        masks = [to_mask(s) for s in cc.sets]
        k = max(m.bit_count() for m in masks)
        self.k = k
        self.masks = _pad(masks, self.n, k)
        self.m1 = DummyExtendedMatroid(inst.matroid_oracle, k)
        colors = list(inst.colors) + [inst.num_colors] * k
        self.m2 = ExtendableFairMatroid(colors, list(inst.lower) + [0], list(inst.upper) + [k], k)

    def round(self, seed=0):
        current, weight = self.masks[0], self.cc.weights[0]
        for t in range(1, len(self.masks)):
            current = _merge_common(
                current, weight, self.masks[t], self.cc.weights[t], self.m1, self.m2, _merge_rng(seed, t)
            )
            weight += self.cc.weights[t]
        return from_mask(current & ((1 << self.n) - 1))


def swap_round_intersection(cc, inst, seed=0, objective=None, force=False):
    """Round a combination of feasible sets to a feasible set."""
    return IntersectionRounder(inst, cc, objective, force).round(seed)
