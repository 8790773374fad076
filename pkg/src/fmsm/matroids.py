"""Matroid independence oracles and max-cardinality matroid intersection.

Oracles answer queries on bitmasks (``indep``) for speed; ``is_independent``
is the checked public entry point taking any iterable of elements.
"""

from collections import deque

import numpy as np

from fmsm.errors import ConfigurationError, UnsupportedSizeError, ValidationError

EXHAUSTIVE_LIMIT = 12


def to_mask(elements):
    m = 0
    for e in elements:
        m |= 1 << int(e)
    return m


def from_mask(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _check_range(n, elements):
    for e in elements:
        if not 0 <= int(e) < n:
            raise ValueError(f"element {e} outside ground set of size {n}")


class MatroidOracle:
    """Independence oracle over the ground set ``range(n)``."""

    n = 0

    def indep(self, mask):
        raise NotImplementedError

    def is_independent(self, elements):
        elements = list(elements)
        _check_range(self.n, elements)
        return self.indep(to_mask(elements))

    @property
    def rank(self):
        if getattr(self, "_rank", None) is None:
            self._rank = len(greedy_basis(self))
        return self._rank

    def classes(self):
        """Equivalence classes, or None when not known structurally."""
        return None

    @property
    def full_mask(self):
        return (1 << self.n) - 1


class UniformMatroid(MatroidOracle):
    def __init__(self, n, k):
        self.n = n
        self.k = k

    def indep(self, mask):
        return mask.bit_count() <= self.k

    @property
    def rank(self):
        return min(self.k, self.n)

    def classes(self):
        return [frozenset(range(self.n))] if self.n else []


class FreeMatroid(UniformMatroid):
    def __init__(self, n):
        super().__init__(n, n)


class PartitionMatroid(MatroidOracle):
    def __init__(self, n, blocks, caps):
        self.n = n
        self.blocks = [frozenset(b) for b in blocks]
        self.caps = list(caps)
        self._masks = [to_mask(b) for b in self.blocks]
        covered = 0
        for m in self._masks:
            if covered & m:
                raise ValidationError("blocks", "blocks must be disjoint")
            covered |= m
        self._free = self.full_mask & ~covered

    def indep(self, mask):
        for bm, cap in zip(self._masks, self.caps):
            if (mask & bm).bit_count() > cap:
                return False
        return True

    @property
    def rank(self):
        return self._free.bit_count() + sum(
            min(len(b), c) for b, c in zip(self.blocks, self.caps)
        )

    def classes(self):
        out = [b for b in self.blocks if b]
        if self._free:
            out.append(from_mask(self._free))
        return out


def color_partition(colors, caps):
    """Partition matroid whose blocks are the color groups."""
    groups = color_groups(colors)
    return PartitionMatroid(len(colors), groups, caps)


def color_groups(colors, num_colors=None):
    if num_colors is None:
        num_colors = max(colors) + 1 if len(colors) else 0
    groups = [[] for _ in range(num_colors)]
    for e, c in enumerate(colors):
        groups[c].append(e)
    return [frozenset(g) for g in groups]


class ExplicitMatroid(MatroidOracle):
    """Matroid given by the list of its independent sets."""

    def __init__(self, n, independent_sets):
        if n > 20:
            raise UnsupportedSizeError("explicit matroids are limited to n <= 20")
        self.n = n
        self.family = frozenset(to_mask(s) for s in independent_sets)

    def indep(self, mask):
        return mask in self.family

    def classes(self):
        return brute_force_classes(self)


class ContractedMatroid(MatroidOracle):
    """``{X : X | S in I}`` for a fixed independent set ``S``."""

    def __init__(self, base, elements):
        self.base = base
        self.n = base.n
        self.fixed = to_mask(elements)
        if not base.indep(self.fixed):
            raise ValueError("contracted set must be independent")

    def indep(self, mask):
        return self.base.indep(mask | self.fixed)


class RestrictedMatroid(MatroidOracle):
    """Base matroid with every element outside ``allowed`` made a loop."""

    def __init__(self, base, allowed):
        self.base = base
        self.n = base.n
        self.allowed = to_mask(allowed)

    def indep(self, mask):
        return not (mask & ~self.allowed) and self.base.indep(mask)


class TruncatedMatroid(MatroidOracle):
    def __init__(self, base, k):
        self.base = base
        self.n = base.n
        self.k = k

    def indep(self, mask):
        return mask.bit_count() <= self.k and self.base.indep(mask)


class ExtendableFairMatroid(MatroidOracle):
    """Sets extendable to a fair set of size at most ``k``.

    ``S`` is independent iff every color count is within its upper bound and
    ``sum_c max(lower_c, |S & V_c|) <= k``.  The color groups are the
    equivalence classes.
    """

    def __init__(self, colors, lower, upper, k):
        self.n = len(colors)
        self.groups = color_groups(colors, len(lower))
        self.lower = list(lower)
        self.upper = list(upper)
        self.k = k
        self._masks = [to_mask(g) for g in self.groups]
        for g, lo, hi in zip(self.groups, self.lower, self.upper):
            if not 0 <= lo <= hi <= len(g):
                raise ValidationError("bounds", "need 0 <= lower <= upper <= |V_c|")
        if sum(self.lower) > k:
            raise ConfigurationError(f"no fair set of size <= {k} exists")

    def indep(self, mask):
        need = 0
        for gm, lo, hi in zip(self._masks, self.lower, self.upper):
            c = (mask & gm).bit_count()
            if c > hi:
                return False
            need += c if c > lo else lo
        return need <= self.k

    @property
    def rank(self):
        return min(self.k, sum(self.upper))

    def classes(self):
        return [g for g in self.groups if g]


class DummyExtendedMatroid(MatroidOracle):
    """``{S in V + E : S - E in I}`` with ``E = {n, ..., n + m - 1}``."""

    def __init__(self, base, num_dummies):
        self.base = base
        self.num_dummies = num_dummies
        self.n = base.n + num_dummies
        self._vmask = base.full_mask

    def indep(self, mask):
        return self.base.indep(mask & self._vmask)

    def classes(self):
        inner = self.base.classes()
        if inner is None:
            return None
        dummies = frozenset(range(self.base.n, self.n))
        return list(inner) + ([dummies] if dummies else [])


def greedy_basis(oracle, order=None, start=0):
    mask = start
    for e in order if order is not None else range(oracle.n):
        bit = 1 << e
        if not mask & bit and oracle.indep(mask | bit):
            mask |= bit
    return from_mask(mask)


# ---------------------------------------------------------------------------
# exhaustive checks (desk scale)


def independence_table(oracle):
    return np.fromiter(
        (oracle.indep(m) for m in range(1 << oracle.n)), dtype=bool, count=1 << oracle.n
    )


def check_matroid_axioms(oracle, limit=EXHAUSTIVE_LIMIT):
    """Return None if ``oracle`` is a matroid, else a description of the failure."""
    n = oracle.n
    if n > limit:
        raise UnsupportedSizeError(f"axiom check limited to n <= {limit}")
    ind = independence_table(oracle)
    if not ind[0]:
        return "empty set is dependent"
    rank = np.zeros(1 << n, dtype=np.int64)
    for m in range(1, 1 << n):
        if ind[m]:
            rank[m] = m.bit_count()
            sub = m
            while sub:
                low = sub & -sub
                if not ind[m ^ low]:
                    return f"not downward closed at {sorted(from_mask(m))}"
                sub ^= low
        else:
            best = 0
            sub = m
            while sub:
                low = sub & -sub
                best = max(best, rank[m ^ low])
                sub ^= low
            rank[m] = best
    for m in np.flatnonzero(ind):
        m = int(m)
        blocked = 0
        for e in range(n):
            bit = 1 << e
            if not m & bit and not ind[m | bit]:
                blocked |= bit
        if rank[m | blocked] > m.bit_count():
            return f"exchange fails for {sorted(from_mask(m))}"
    return None


def brute_force_classes(oracle, limit=EXHAUSTIVE_LIMIT):
    """Equivalence classes by testing the swap condition on every independent set."""
    n = oracle.n
    if n > limit:
        raise UnsupportedSizeError(f"equivalence classes limited to n <= {limit}")
    ind = independence_table(oracle)
    masks = np.arange(1 << n)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            pair = (1 << i) | (1 << j)
            base = masks[((masks & pair) == 0) & ind]
            if np.array_equal(ind[base | (1 << i)], ind[base | (1 << j)]):
                parent[find(j)] = find(i)
    groups = {}
    for e in range(n):
        groups.setdefault(find(e), []).append(e)
    return [frozenset(g) for g in groups.values()]


def equivalence_classes(oracle):
    classes = oracle.classes()
    if classes is None:
        classes = brute_force_classes(oracle)
    return sorted(classes, key=min)


# ---------------------------------------------------------------------------
# matroid intersection


def max_cardinality_intersection(m1, m2, start=None):
    """Largest set independent in both matroids.

    Shortest augmenting paths in the exchange graph, scanning elements in
    ascending index order so the result is deterministic.
    """
    if m1.n != m2.n:
        raise ValueError("matroids must share a ground set")
    n = m1.n
    current = 0
    if start is not None:
        current = to_mask(start)
        if not (m1.indep(current) and m2.indep(current)):
            raise ValueError("start set must be independent in both matroids")
    for e in range(n):
        bit = 1 << e
        if not current & bit and m1.indep(current | bit) and m2.indep(current | bit):
            current |= bit

    while True:
        path = _augmenting_path(m1, m2, current)
        if path is None:
            return from_mask(current)
        for e in path:
            current ^= 1 << e


def _augmenting_path(m1, m2, current):
    n = m1.n
    inside = [e for e in range(n) if current >> e & 1]
    outside = [e for e in range(n) if not current >> e & 1]
    sources = [y for y in outside if m1.indep(current | 1 << y)]
    sinks = {y for y in outside if m2.indep(current | 1 << y)}
    prev = {}
    queue = deque()
    for y in sources:
        prev[y] = None
        queue.append(y)
    while queue:
        v = queue.popleft()
        if v in sinks:
            path = []
            while v is not None:
                path.append(v)
                v = prev[v]
            return path[::-1]
        if current >> v & 1:
            # x in I -> y outside with I - x + y in M1
            for y in outside:
                if y not in prev and m1.indep((current ^ (1 << v)) | 1 << y):
                    prev[y] = v
                    queue.append(y)
        else:
            # y outside -> x in I with I - x + y in M2
            for x in inside:
                if x not in prev and m2.indep((current ^ (1 << x)) | 1 << v):
                    prev[x] = v
                    queue.append(x)
    return None
