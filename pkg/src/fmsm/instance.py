"""Problem instances: data model, validation, JSON I/O and generators.

JSON layout (all indices 0-based)::

    {"n": 6, "colors": [...], "lower": [...], "upper": [...],
     "matroid": {"kind": "uniform", "k": 3}
              | {"kind": "partition", "blocks": [[...], ...], "caps": [...]}
              | {"kind": "explicit", "independent_sets": [[...], ...]},
     "objective": {"kind": "coverage", "universe_size": u,
                   "covered_by": [[...], ...], "weights": [...]}
                | {"kind": "graph_cut", "edges": [[u, v, w], ...]}
                | {"kind": "facility_location", "values": [[...], ...]}
                | {"kind": "modular", "weights": [...]}
                | {"kind": "welfare", "num_agents": a, "num_items": m,
                   "agent_colors": [...], "utilities": [<coverage>, ...]}
                | {"kind": "decomposable",
                   "class_parts": [{"elements": [...], "objective": {...}}, ...],
                   "color_parts": [...]}}

Objectives nested inside welfare and decomposable entries are defined over
their own local ground set.  Unknown keys are rejected.
"""

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from fmsm import matroids as mt
from fmsm import objectives as ob
from fmsm.errors import GenerationError, UnsupportedSizeError, ValidationError

EXPLICIT_LIMIT = 20


# ---------------------------------------------------------------------------
# matroid descriptions


@dataclass(frozen=True)
class UniformSpec:
    k: int


@dataclass(frozen=True)
class PartitionSpec:
    blocks: tuple
    caps: tuple


@dataclass(frozen=True)
class ExplicitSpec:
    independent_sets: tuple


# ---------------------------------------------------------------------------
# objective descriptions


@dataclass(frozen=True)
class CoverageSpec:
    universe_size: int
    covered_by: tuple
    weights: tuple


@dataclass(frozen=True)
class GraphCutSpec:
    edges: tuple


@dataclass(frozen=True)
class FacilityLocationSpec:
    values: tuple


@dataclass(frozen=True)
class ModularSpec:
    weights: tuple


@dataclass(frozen=True)
class WelfareSpec:
    num_agents: int
    num_items: int
    agent_colors: tuple
    utilities: tuple


@dataclass(frozen=True)
class PartSpec:
    elements: tuple
    objective: object


@dataclass(frozen=True)
class DecomposableSpec:
    class_parts: tuple
    color_parts: tuple


MONOTONE_KINDS = (CoverageSpec, FacilityLocationSpec, ModularSpec, WelfareSpec)


@dataclass(frozen=True)
class Instance:
    n: int
    colors: tuple
    lower: tuple
    upper: tuple
    matroid: object
    objective: object

    @property
    def num_colors(self):
        return len(self.lower)

    @cached_property
    def groups(self):
        return tuple(mt.color_groups(self.colors, self.num_colors))

    @cached_property
    def group_sizes(self):
        return tuple(len(g) for g in self.groups)

    @cached_property
    def matroid_oracle(self):
        return build_matroid(self.matroid, self.n)

    def objective_oracle(self):
        """A fresh oracle (fresh call counter) for the objective."""
        return build_objective(self.objective, self.n)

    def color_counts(self, elements):
        counts = [0] * self.num_colors
        for e in elements:
            counts[self.colors[e]] += 1
        return counts

    def is_fair(self, elements):
        counts = self.color_counts(elements)
        return all(lo <= c <= hi for c, lo, hi in zip(counts, self.lower, self.upper))

    def is_feasible(self, elements):
        elements = list(elements)
        return self.matroid_oracle.is_independent(elements) and self.is_fair(elements)

    def replace(self, **changes):
        fields = {k: getattr(self, k) for k in ("n", "colors", "lower", "upper", "matroid", "objective")}
        fields.update(changes)
        return Instance(**fields)


def build_matroid(spec, n):
    if isinstance(spec, UniformSpec):
        return mt.UniformMatroid(n, spec.k)
    if isinstance(spec, PartitionSpec):
        return mt.PartitionMatroid(n, spec.blocks, spec.caps)
    if isinstance(spec, ExplicitSpec):
        return mt.ExplicitMatroid(n, spec.independent_sets)
    raise ValidationError("matroid", f"unknown matroid description {spec!r}")


def build_objective(spec, n):
    if isinstance(spec, CoverageSpec):
        return ob.CoverageOracle(spec.universe_size, spec.covered_by, spec.weights)
    if isinstance(spec, GraphCutSpec):
        return ob.GraphCutOracle(n, spec.edges)
    if isinstance(spec, FacilityLocationSpec):
        return ob.FacilityLocationOracle(np.array(spec.values, dtype=np.float64).reshape(-1, n))
    if isinstance(spec, ModularSpec):
        return ob.ModularOracle(spec.weights)
    if isinstance(spec, WelfareSpec):
        utils = [build_objective(u, spec.num_items) for u in spec.utilities]
        return ob.welfare_oracle(spec.num_agents, spec.num_items, utils, spec.agent_colors)
    if isinstance(spec, DecomposableSpec):

        def parts(specs):
            return [
                ob.Part(p.elements, build_objective(p.objective, len(p.elements))) for p in specs
            ]

        return ob.decomposable_oracle(n, parts(spec.class_parts), parts(spec.color_parts))
    raise ValidationError("objective", f"unknown objective description {spec!r}")


# ---------------------------------------------------------------------------
# validation


def _require(cond, path, message):
    if not cond:
        raise ValidationError(path, message)


def _check_elements(elements, n, path):
    for j, e in enumerate(elements):
        _require(isinstance(e, (int, np.integer)) and 0 <= e < n, f"{path}[{j}]", f"element {e!r} not in 0..{n - 1}")


def validate(inst):
    """Raise ValidationError (with a field path) if ``inst`` is malformed."""
    n = inst.n
    _require(isinstance(n, int) and n >= 1, "n", "must be a positive integer")
    _require(len(inst.colors) == n, "colors", f"length {len(inst.colors)} != n = {n}")
    C = len(inst.lower)
    _require(C >= 1, "lower", "at least one color is required")
    _require(len(inst.upper) == C, "upper", f"length {len(inst.upper)} != {C} colors")
    for i, c in enumerate(inst.colors):
        _require(isinstance(c, (int, np.integer)) and 0 <= c < C, f"colors[{i}]", f"color {c!r} not in 0..{C - 1}")
    sizes = [0] * C
    for c in inst.colors:
        sizes[c] += 1
    for c in range(C):
        _require(sizes[c] > 0, "colors", f"color {c} has no elements")
        lo, hi = inst.lower[c], inst.upper[c]
        _require(isinstance(lo, (int, np.integer)) and lo >= 0, f"lower[{c}]", "must be a non-negative integer")
        _require(isinstance(hi, (int, np.integer)) and lo <= hi <= sizes[c], f"upper[{c}]", f"need lower <= upper <= |V_c| = {sizes[c]}")
    _validate_matroid(inst.matroid, n)
    _validate_objective(inst.objective, n, "objective")
    if isinstance(inst.objective, WelfareSpec):
        w = inst.objective
        for a in range(w.num_agents):
            for j in range(w.num_items):
                e = a * w.num_items + j
                _require(
                    inst.colors[e] == w.agent_colors[a],
                    f"colors[{e}]",
                    f"welfare element of agent {a} must carry color {w.agent_colors[a]}",
                )
    return inst


def _validate_matroid(spec, n):
    if isinstance(spec, UniformSpec):
        _require(isinstance(spec.k, (int, np.integer)) and spec.k >= 0, "matroid.k", "must be a non-negative integer")
    elif isinstance(spec, PartitionSpec):
        _require(len(spec.blocks) == len(spec.caps), "matroid.caps", "one cap per block")
        seen = set()
        for b, block in enumerate(spec.blocks):
            _check_elements(block, n, f"matroid.blocks[{b}]")
            _require(not seen & set(block), f"matroid.blocks[{b}]", "blocks must be disjoint")
            seen |= set(block)
            _require(spec.caps[b] >= 0, f"matroid.caps[{b}]", "must be non-negative")
    elif isinstance(spec, ExplicitSpec):
        if n > EXPLICIT_LIMIT:
            raise UnsupportedSizeError(f"explicit matroids are limited to n <= {EXPLICIT_LIMIT}")
        for s, members in enumerate(spec.independent_sets):
            _check_elements(members, n, f"matroid.independent_sets[{s}]")
        failure = mt.check_matroid_axioms(mt.ExplicitMatroid(n, spec.independent_sets), limit=EXPLICIT_LIMIT)
        _require(failure is None, "matroid.independent_sets", str(failure))
    else:
        raise ValidationError("matroid", f"unknown matroid description {spec!r}")


def _validate_objective(spec, n, path):
    if isinstance(spec, CoverageSpec):
        _require(len(spec.covered_by) == n, f"{path}.covered_by", f"need one entry per element ({n})")
        _require(len(spec.weights) == spec.universe_size, f"{path}.weights", "one weight per universe point")
        for i, cov in enumerate(spec.covered_by):
            _check_elements(cov, spec.universe_size, f"{path}.covered_by[{i}]")
        _require(all(w >= 0 for w in spec.weights), f"{path}.weights", "must be non-negative")
    elif isinstance(spec, GraphCutSpec):
        for j, edge in enumerate(spec.edges):
            _require(len(edge) == 3, f"{path}.edges[{j}]", "expected [u, v, weight]")
            _check_elements(edge[:2], n, f"{path}.edges[{j}]")
            _require(edge[2] >= 0, f"{path}.edges[{j}]", "weight must be non-negative")
    elif isinstance(spec, FacilityLocationSpec):
        for c, row in enumerate(spec.values):
            _require(len(row) == n, f"{path}.values[{c}]", f"need {n} entries")
            _require(all(v >= 0 for v in row), f"{path}.values[{c}]", "must be non-negative")
    elif isinstance(spec, ModularSpec):
        _require(len(spec.weights) == n, f"{path}.weights", f"need {n} entries")
        _require(all(w >= 0 for w in spec.weights), f"{path}.weights", "must be non-negative")
    elif isinstance(spec, WelfareSpec):
        _require(spec.num_agents * spec.num_items == n, path, "n must equal num_agents * num_items")
        _require(len(spec.agent_colors) == spec.num_agents, f"{path}.agent_colors", "one color per agent")
        _require(len(spec.utilities) == spec.num_agents, f"{path}.utilities", "one utility per agent")
        for a, util in enumerate(spec.utilities):
            _require(isinstance(util, CoverageSpec), f"{path}.utilities[{a}]", "utilities are coverage functions")
            _validate_objective(util, spec.num_items, f"{path}.utilities[{a}]")
    elif isinstance(spec, DecomposableSpec):
        seen = set()
        for name in ("class_parts", "color_parts"):
            for j, part in enumerate(getattr(spec, name)):
                p = f"{path}.{name}[{j}]"
                _check_elements(part.elements, n, f"{p}.elements")
                _require(len(set(part.elements)) == len(part.elements), f"{p}.elements", "duplicate element")
                _validate_objective(part.objective, len(part.elements), f"{p}.objective")
        del seen
    else:
        raise ValidationError(path, f"unknown objective description {spec!r}")


def is_monotone_spec(spec):
    if isinstance(spec, MONOTONE_KINDS):
        return True
    if isinstance(spec, DecomposableSpec):
        return all(is_monotone_spec(p.objective) for p in spec.class_parts + spec.color_parts)
    return False


# ---------------------------------------------------------------------------
# feasibility


def feasible_witness(inst):
    """A feasible set, or None when none exists.

    A largest set independent in the matroid and holding at most ``lower_c``
    elements of each color reaches size ``sum(lower)`` exactly when some
    independent set meets every lower bound; that set also respects the
    upper bounds because ``lower_c <= upper_c``.
    """
    caps = mt.PartitionMatroid(inst.n, inst.groups, inst.lower)
    best = mt.max_cardinality_intersection(inst.matroid_oracle, caps)
    if len(best) < sum(inst.lower):
        return None
    return best


def feasibility_check(inst):
    validate(inst)
    return feasible_witness(inst) is not None


# ---------------------------------------------------------------------------
# JSON


def _take(d, path, required, optional=()):
    if not isinstance(d, dict):
        raise ValidationError(path, "expected an object")
    unknown = set(d) - set(required) - set(optional) - {"kind"}
    if unknown:
        raise ValidationError(path, f"unknown keys {sorted(unknown)}")
    for key in required:
        if key not in d:
            raise ValidationError(f"{path}.{key}" if path else key, "missing")
    return d


def _int_list(v, path):
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise ValidationError(path, "expected a list of integers")
    return tuple(v)


def _num_list(v, path):
    if not isinstance(v, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) and np.isfinite(x) for x in v
    ):
        raise ValidationError(path, "expected a list of finite numbers")
    return tuple(float(x) for x in v)


def _nested(v, path, item):
    if not isinstance(v, list):
        raise ValidationError(path, "expected a list")
    return tuple(item(x, f"{path}[{j}]") for j, x in enumerate(v))


def _matroid_from_dict(d, path="matroid"):
    kind = _take(d, path, ["kind"], ["k", "blocks", "caps", "independent_sets"]).get("kind")
    if kind == "uniform":
        _take(d, path, ["k"])
        if not isinstance(d["k"], int):
            raise ValidationError(f"{path}.k", "expected an integer")
        return UniformSpec(d["k"])
    if kind == "partition":
        _take(d, path, ["blocks", "caps"])
        return PartitionSpec(_nested(d["blocks"], f"{path}.blocks", _int_list), _int_list(d["caps"], f"{path}.caps"))
    if kind == "explicit":
        _take(d, path, ["independent_sets"])
        return ExplicitSpec(_nested(d["independent_sets"], f"{path}.independent_sets", _int_list))
    raise ValidationError(f"{path}.kind", f"unknown matroid kind {kind!r}")


def _objective_from_dict(d, path="objective"):
    _take(d, path, ["kind"], ["universe_size", "covered_by", "weights", "edges", "values",
                              "num_agents", "num_items", "agent_colors", "utilities",
                              "class_parts", "color_parts"])
    kind = d["kind"]
    if kind == "coverage":
        _take(d, path, ["universe_size", "covered_by"], ["weights"])
        u = d["universe_size"]
        if not isinstance(u, int) or u < 0:
            raise ValidationError(f"{path}.universe_size", "expected a non-negative integer")
        weights = _num_list(d["weights"], f"{path}.weights") if "weights" in d else (1.0,) * u
        return CoverageSpec(u, _nested(d["covered_by"], f"{path}.covered_by", _int_list), weights)
    if kind == "graph_cut":
        _take(d, path, ["edges"])

        def edge(v, p):
            vals = _num_list(v, p)
            if len(vals) != 3 or vals[0] != int(vals[0]) or vals[1] != int(vals[1]):
                raise ValidationError(p, "expected [u, v, weight]")
            return (int(vals[0]), int(vals[1]), vals[2])

        return GraphCutSpec(_nested(d["edges"], f"{path}.edges", edge))
    if kind == "facility_location":
        _take(d, path, ["values"])
        return FacilityLocationSpec(_nested(d["values"], f"{path}.values", _num_list))
    if kind == "modular":
        _take(d, path, ["weights"])
        return ModularSpec(_num_list(d["weights"], f"{path}.weights"))
    if kind == "welfare":
        _take(d, path, ["num_agents", "num_items", "agent_colors", "utilities"])
        for key in ("num_agents", "num_items"):
            if not isinstance(d[key], int) or d[key] < 0:
                raise ValidationError(f"{path}.{key}", "expected a non-negative integer")
        return WelfareSpec(
            d["num_agents"],
            d["num_items"],
            _int_list(d["agent_colors"], f"{path}.agent_colors"),
            _nested(d["utilities"], f"{path}.utilities", _objective_from_dict),
        )
    if kind == "decomposable":
        _take(d, path, [], ["class_parts", "color_parts"])

        def part(v, p):
            _take(v, p, ["elements", "objective"])
            return PartSpec(_int_list(v["elements"], f"{p}.elements"), _objective_from_dict(v["objective"], f"{p}.objective"))

        return DecomposableSpec(
            _nested(d.get("class_parts", []), f"{path}.class_parts", part),
            _nested(d.get("color_parts", []), f"{path}.color_parts", part),
        )
    raise ValidationError(f"{path}.kind", f"unknown objective kind {kind!r}")


def from_dict(d):
    """Parse and validate an instance from its JSON object form."""
    _take(d, "", ["n", "colors", "lower", "upper", "matroid", "objective"])
    if not isinstance(d["n"], int) or isinstance(d["n"], bool):
        raise ValidationError("n", "expected an integer")
    inst = Instance(
        n=d["n"],
        colors=_int_list(d["colors"], "colors"),
        lower=_int_list(d["lower"], "lower"),
        upper=_int_list(d["upper"], "upper"),
        matroid=_matroid_from_dict(d["matroid"]),
        objective=_objective_from_dict(d["objective"]),
    )
    return validate(inst)


def _matroid_to_dict(spec):
    if isinstance(spec, UniformSpec):
        return {"kind": "uniform", "k": int(spec.k)}
    if isinstance(spec, PartitionSpec):
        return {"kind": "partition", "blocks": [list(map(int, b)) for b in spec.blocks], "caps": list(map(int, spec.caps))}
    return {"kind": "explicit", "independent_sets": [sorted(map(int, s)) for s in spec.independent_sets]}


def _objective_to_dict(spec):
    if isinstance(spec, CoverageSpec):
        return {
            "kind": "coverage",
            "universe_size": int(spec.universe_size),
            "covered_by": [list(map(int, c)) for c in spec.covered_by],
            "weights": list(map(float, spec.weights)),
        }
    if isinstance(spec, GraphCutSpec):
        return {"kind": "graph_cut", "edges": [[int(u), int(v), float(w)] for u, v, w in spec.edges]}
    if isinstance(spec, FacilityLocationSpec):
        return {"kind": "facility_location", "values": [list(map(float, r)) for r in spec.values]}
    if isinstance(spec, ModularSpec):
        return {"kind": "modular", "weights": list(map(float, spec.weights))}
    if isinstance(spec, WelfareSpec):
        return {
            "kind": "welfare",
            "num_agents": int(spec.num_agents),
            "num_items": int(spec.num_items),
            "agent_colors": list(map(int, spec.agent_colors)),
            "utilities": [_objective_to_dict(u) for u in spec.utilities],
        }

    def part(p):
        return {"elements": list(map(int, p.elements)), "objective": _objective_to_dict(p.objective)}

    return {
        "kind": "decomposable",
        "class_parts": [part(p) for p in spec.class_parts],
        "color_parts": [part(p) for p in spec.color_parts],
    }


def to_dict(inst):
    return {
        "n": int(inst.n),
        "colors": list(map(int, inst.colors)),
        "lower": list(map(int, inst.lower)),
        "upper": list(map(int, inst.upper)),
        "matroid": _matroid_to_dict(inst.matroid),
        "objective": _objective_to_dict(inst.objective),
    }


def dumps(inst):
    return json.dumps(to_dict(inst), allow_nan=False)


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("", f"invalid JSON: {exc}") from exc
    return from_dict(data)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(inst, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(inst))


# ---------------------------------------------------------------------------
# generators


def gen_integrality_gap(t, s):
    """``t`` vertex-disjoint paths of length ``2s+1`` joining vertices 1 and 2.

    Elements are edges, numbered path by path.  Each vertex of side A (vertex
    1 and the even interior vertices) bounds its incident edges by one;
    each vertex of side B (vertex 2 and the odd interior vertices) is a color
    requiring exactly one incident edge.  The objective counts the paths
    whose odd edges are touched.
    """
    if not (isinstance(t, int) and t >= 2):
        raise ValueError("t must be an integer >= 2")
    if not (isinstance(s, int) and s >= 1):
        raise ValueError("s must be an integer >= 1")
    L = 2 * s + 1
    n = t * L

    def edge(i, j):  # j-th edge of path i, j = 1..L
        return i * L + j - 1

    a_blocks = [[edge(i, 1) for i in range(t)]]
    b_groups = [[edge(i, L) for i in range(t)]]
    for i in range(t):
        for m in range(1, s + 1):
            a_blocks.append([edge(i, 2 * m), edge(i, 2 * m + 1)])
            b_groups.append([edge(i, 2 * m - 1), edge(i, 2 * m)])
    colors = [0] * n
    for c, grp in enumerate(b_groups):
        for e in grp:
            colors[e] = c
    covered_by = [() for _ in range(n)]
    for i in range(t):
        for j in range(1, L + 1, 2):
            covered_by[edge(i, j)] = (i,)
    C = len(b_groups)
    return validate(
        Instance(
            n=n,
            colors=tuple(colors),
            lower=(1,) * C,
            upper=(1,) * C,
            matroid=PartitionSpec(tuple(tuple(b) for b in a_blocks), (1,) * len(a_blocks)),
            objective=CoverageSpec(t, tuple(covered_by), (1.0,) * t),
        )
    )


MATROID_KINDS = ("uniform", "partition")
OBJECTIVE_KINDS = ("coverage", "graph_cut", "facility_location", "modular")


def _random_matroid(rng, n, kind):
    if kind == "uniform":
        return UniformSpec(int(rng.integers(max(1, n // 4), max(1, (3 * n) // 4) + 1)))
    if kind == "partition":
        num_blocks = int(rng.integers(2, max(2, n // 3) + 1)) if n >= 2 else 1
        labels = np.concatenate((np.arange(num_blocks), rng.integers(num_blocks, size=n - num_blocks)))
        labels = rng.permutation(labels)
        blocks = tuple(tuple(int(e) for e in np.flatnonzero(labels == b)) for b in range(num_blocks))
        caps = tuple(int(rng.integers(1, len(b) + 1)) for b in blocks)
        return PartitionSpec(blocks, caps)
    raise ValueError(f"unknown matroid kind {kind!r}; choose from {MATROID_KINDS}")


def _random_objective(rng, n, kind):
    if kind == "coverage":
        u = n
        covered_by = tuple(
            tuple(sorted(int(x) for x in rng.choice(u, size=int(rng.integers(1, min(3, u) + 1)), replace=False)))
            for _ in range(n)
        )
        weights = tuple(float(w) for w in rng.integers(1, 6, size=u))
        return CoverageSpec(u, covered_by, weights)
    if kind == "graph_cut":
        edges = []
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() < 0.4:
                    edges.append((a, b, float(rng.integers(1, 6))))
        return GraphCutSpec(tuple(edges))
    if kind == "facility_location":
        clients = n // 2 + 1
        vals = rng.integers(0, 10, size=(clients, n)).astype(float)
        return FacilityLocationSpec(tuple(tuple(r) for r in vals.tolist()))
    if kind == "modular":
        return ModularSpec(tuple(float(w) for w in rng.integers(1, 10, size=n)))
    raise ValueError(f"unknown objective kind {kind!r}; choose from {OBJECTIVE_KINDS}")


def gen_random(n, num_colors, matroid_kind="uniform", objective_kind="coverage", seed=0, max_retries=100):
    """Random feasible instance, deterministic in ``seed``.

    Colors cover every group; the matroid and objective are drawn once and
    the bounds are redrawn until the instance is feasible.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("n must be a positive integer")
    if not 1 <= num_colors <= n:
        raise ValueError("num_colors must lie in 1..n")
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.concatenate((np.arange(num_colors), rng.integers(num_colors, size=n - num_colors))))
    colors = tuple(int(c) for c in labels)
    sizes = np.bincount(labels, minlength=num_colors)
    matroid = _random_matroid(rng, n, matroid_kind)
    objective = _random_objective(rng, n, objective_kind)
    for _ in range(max_retries):
        upper = tuple(int(rng.integers(1, s + 1)) for s in sizes)
        lower = tuple(int(rng.integers(0, min(u, 2) + 1)) for u in upper)
        inst = Instance(n, colors, lower, upper, matroid, objective)
        if feasibility_check(inst):
            return inst
    raise GenerationError(f"no feasible bounds found in {max_retries} attempts")


def gen_welfare(num_agents, num_items, agent_colors, seed=0, max_retries=100):
    """Fair welfare instance: each item goes to at most one agent and every
    agent color group receives a bounded number of items."""
    if num_agents < 1 or num_items < 1:
        raise ValueError("need at least one agent and one item")
    if len(agent_colors) != num_agents:
        raise ValueError("one color per agent")
    rng = np.random.default_rng(seed)
    C = max(agent_colors) + 1
    n = num_agents * num_items
    colors = tuple(int(agent_colors[e // num_items]) for e in range(n))
    blocks = tuple(tuple(a * num_items + j for a in range(num_agents)) for j in range(num_items))
    utilities = []
    for _ in range(num_agents):
        u = num_items + 1
        covered_by = tuple(
            tuple(sorted(int(x) for x in rng.choice(u, size=int(rng.integers(1, 3)), replace=False)))
            for _ in range(num_items)
        )
        utilities.append(CoverageSpec(u, covered_by, tuple(float(w) for w in rng.integers(1, 6, size=u))))
    objective = WelfareSpec(num_agents, num_items, tuple(int(c) for c in agent_colors), tuple(utilities))
    sizes = np.bincount(np.asarray(colors), minlength=C)
    for _ in range(max_retries):
        upper = tuple(int(rng.integers(1, min(s, num_items) + 1)) for s in sizes)
        lower = tuple(int(rng.integers(0, u + 1)) for u in upper)
        inst = Instance(n, colors, lower, upper, PartitionSpec(blocks, (1,) * num_items), objective)
        if feasibility_check(inst):
            return inst
    raise GenerationError(f"no feasible bounds found in {max_retries} attempts")
