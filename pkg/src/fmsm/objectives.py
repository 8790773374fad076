"""Set-function value oracles with call counting.

Oracles evaluate bitmasks through ``value_mask`` and full subset tables
through ``value_table`` (used by exact multilinear evaluation and brute
force).  ``value`` is the checked entry point taking an iterable of elements.
"""

import threading
from dataclasses import dataclass, field

import numpy as np

from fmsm import kernels
from fmsm.matroids import from_mask, to_mask

TABLE_LIMIT = 22


class _Counter:
    def __init__(self):
        self._lock = threading.Lock()
        self.count = 0

    def add(self, k=1):
        with self._lock:
            self.count += k


@dataclass(frozen=True)
class Part:
    """A set function restricted to ``elements``; local index ``j`` is ``elements[j]``."""

    elements: tuple
    oracle: "SubmodularOracle"

    def local_mask(self, mask):
        out = 0
        for j, e in enumerate(self.elements):
            if mask >> e & 1:
                out |= 1 << j
        return out

    def value_mask(self, mask):
        return self.oracle.value_mask(self.local_mask(mask))


@dataclass(frozen=True)
class Decomposition:
    """Declared split into parts over equivalence classes and parts over colors."""

    class_parts: tuple = field(default_factory=tuple)
    color_parts: tuple = field(default_factory=tuple)

    def value_mask(self, mask):
        return sum(p.value_mask(mask) for p in self.class_parts) + sum(
            p.value_mask(mask) for p in self.color_parts
        )

    def compatible_with(self, classes, color_groups):
        """True if every part lives inside one class (resp. one color group)
        and no two parts share a class or color group."""
        return _parts_fit(self.class_parts, classes) and _parts_fit(
            self.color_parts, color_groups
        )


def _parts_fit(parts, groups):
    used = set()
    for p in parts:
        owner = [i for i, g in enumerate(groups) if set(p.elements) <= set(g)]
        if not p.elements:
            continue
        if not owner or owner[0] in used:
            return False
        used.add(owner[0])
    return True


class SubmodularOracle:
    """Value oracle on the ground set ``range(n)``."""

    n = 0
    monotone = False
    decomposition = None

    def __init__(self):
        self._counter = _Counter()
        self._table = None

    @property
    def calls(self):
        return self._counter.count

    def reset_calls(self):
        self._counter.count = 0

    def _eval(self, mask):
        raise NotImplementedError

    def value_mask(self, mask):
        self._counter.add()
        return self._eval(mask)

    def value(self, elements):
        elements = list(elements)
        for e in elements:
            if not 0 <= int(e) < self.n:
                raise ValueError(f"element {e} outside ground set of size {self.n}")
        return self.value_mask(to_mask(elements))

    def _build_table(self):
        return np.fromiter(
            (self._eval(m) for m in range(1 << self.n)), dtype=np.float64, count=1 << self.n
        )

    def value_table(self):
        """Values of all ``2**n`` subsets indexed by bitmask (cached)."""
        if self._table is None:
            if self.n > TABLE_LIMIT:
                raise ValueError(f"subset table limited to n <= {TABLE_LIMIT}")
            table = self._build_table()
            table.setflags(write=False)
            self._counter.add(1 << self.n)
            self._table = table
        return self._table


class CoverageOracle(SubmodularOracle):
    """Weighted coverage: ``f(S)`` is the weight of universe points covered by ``S``."""

    monotone = True

    def __init__(self, universe_size, covered_by, weights=None):
        super().__init__()
        self.n = len(covered_by)
        self.universe_size = universe_size
        self.covered_by = [tuple(c) for c in covered_by]
        self.weights = (
            np.ones(universe_size) if weights is None else np.asarray(weights, dtype=np.float64)
        )
        self._cover = [to_mask(c) for c in self.covered_by]

    def _eval(self, mask):
        union = 0
        i = 0
        while mask:
            if mask & 1:
                union |= self._cover[i]
            mask >>= 1
            i += 1
        return float(sum(self.weights[j] for j in from_mask(union)))

    def _build_table(self):
        cover = np.zeros((self.n, self.universe_size), dtype=bool)
        for i, c in enumerate(self.covered_by):
            cover[i, list(c)] = True
        return kernels.coverage_table(cover, self.weights)


class GraphCutOracle(SubmodularOracle):
    """Weight of edges with exactly one endpoint in ``S``."""

    def __init__(self, n, edges):
        super().__init__()
        self.n = n
        self.edges = [(int(u), int(v), float(w)) for u, v, w in edges]

    def _eval(self, mask):
        total = 0.0
        for u, v, w in self.edges:
            if (mask >> u & 1) != (mask >> v & 1):
                total += w
        return total

    def _build_table(self):
        adj = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            if u != v:
                adj[u, v] += w
                adj[v, u] += w
        return kernels.cut_table(adj)


class FacilityLocationOracle(SubmodularOracle):
    """Sum over clients of the best value among open facilities."""

    monotone = True

    def __init__(self, values):
        super().__init__()
        self.values = np.asarray(values, dtype=np.float64)
        self.n = self.values.shape[1]

    def _eval(self, mask):
        idx = sorted(from_mask(mask))
        if not idx:
            return 0.0
        return float(self.values[:, idx].max(axis=1).sum())

    def _build_table(self):
        return kernels.facility_table(self.values)


class ModularOracle(SubmodularOracle):
    monotone = True

    def __init__(self, weights):
        super().__init__()
        self.weights = np.asarray(weights, dtype=np.float64)
        self.n = len(self.weights)

    def _eval(self, mask):
        return float(sum(self.weights[i] for i in from_mask(mask)))

    def _build_table(self):
        return kernels.modular_table(self.weights)


class SumOracle(SubmodularOracle):
    """Sum of part functions, each reading its own slice of the ground set."""

    def __init__(self, n, parts, monotone):
        super().__init__()
        self.n = n
        self.parts = tuple(parts)
        self.monotone = monotone

    def _eval(self, mask):
        return float(sum(p.value_mask(mask) for p in self.parts))

    def _build_table(self):
        table = np.zeros(1 << self.n)
        masks = np.arange(1 << self.n)
        for p in self.parts:
            local = np.zeros(1 << self.n, dtype=np.int64)
            for j, e in enumerate(p.elements):
                local |= ((masks >> e) & 1) << j
            table += p.oracle.value_table()[local]
        return table


def welfare_oracle(num_agents, num_items, utilities, agent_colors):
    """Submodular welfare: element ``a * num_items + j`` gives item ``j`` to agent ``a``.

    The decomposition over agent colors is declared on the result.
    """
    n = num_agents * num_items
    parts = []
    for a, util in enumerate(utilities):
        parts.append(Part(tuple(range(a * num_items, (a + 1) * num_items)), util))
    oracle = SumOracle(n, parts, monotone=all(u.monotone for u in utilities))
    color_parts = []
    for c in sorted(set(agent_colors)):
        members = [a for a in range(num_agents) if agent_colors[a] == c]
        elements = tuple(a * num_items + j for a in members for j in range(num_items))
        sub = SumOracle(
            len(elements),
            [
                Part(tuple(range(i * num_items, (i + 1) * num_items)), utilities[a])
                for i, a in enumerate(members)
            ],
            monotone=oracle.monotone,
        )
        color_parts.append(Part(elements, sub))
    oracle.decomposition = Decomposition((), tuple(color_parts))
    return oracle


def decomposable_oracle(n, class_parts, color_parts):
    parts = list(class_parts) + list(color_parts)
    oracle = SumOracle(n, parts, monotone=all(p.oracle.monotone for p in parts))
    oracle.decomposition = Decomposition(tuple(class_parts), tuple(color_parts))
    return oracle


class ComplementOracle(SubmodularOracle):
    """``g(S) = f(V - S)``."""

    def __init__(self, base):
        super().__init__()
        self.base = base
        self.n = base.n
        self._full = (1 << base.n) - 1

    def _eval(self, mask):
        return self.base._eval(self._full ^ mask)

    def _build_table(self):
        # full ^ m reverses the index order
        return np.ascontiguousarray(self.base.value_table()[::-1])


def complement(oracle):
    if isinstance(oracle, ComplementOracle):
        return oracle.base
    return ComplementOracle(oracle)


class DummyExtendedOracle(SubmodularOracle):
    """``g(S) = f(S - E)`` on ``V + E`` with ``E = {n, ..., n + m - 1}``."""

    def __init__(self, base, num_dummies):
        super().__init__()
        if num_dummies < 0:
            raise ValueError("number of dummies must be non-negative")
        self.base = base
        self.num_dummies = num_dummies
        self.n = base.n + num_dummies
        self.monotone = base.monotone
        self.decomposition = base.decomposition
        self._vmask = (1 << base.n) - 1

    def _eval(self, mask):
        return self.base._eval(mask & self._vmask)

    def _build_table(self):
        return np.tile(self.base.value_table(), 1 << self.num_dummies)


def dummy_extend(oracle, dummies):
    """Extend ``oracle`` by the dummy elements ``dummies`` (must be ``n, n+1, ...``)."""
    dummies = sorted(int(d) for d in dummies)
    if any(d < oracle.n for d in dummies):
        raise ValueError("dummy elements must lie outside the ground set")
    if dummies != list(range(oracle.n, oracle.n + len(dummies))):
        raise ValueError("dummy elements must be numbered consecutively from n")
    return DummyExtendedOracle(oracle, len(dummies))


# ---------------------------------------------------------------------------
# exhaustive property checks


def submodularity_gap(oracle):
    """Smallest ``f(S+i) + f(S+j) - f(S) - f(S+i+j)``; negative means not submodular.

    The pairwise local condition over all ``S`` is equivalent to diminishing
    returns for every ``Y <= X``.
    """
    return float(kernels.submodularity_gap(oracle.value_table(), oracle.n))


def monotonicity_gap(oracle):
    return float(kernels.monotonicity_gap(oracle.value_table(), oracle.n))


def is_submodular(oracle, tol=1e-9):
    return oracle.n < 2 or submodularity_gap(oracle) >= -tol


def is_monotone(oracle, tol=1e-9):
    return oracle.n < 1 or monotonicity_gap(oracle) >= -tol


def is_nonnegative(oracle, tol=1e-12):
    return float(oracle.value_table().min()) >= -tol
