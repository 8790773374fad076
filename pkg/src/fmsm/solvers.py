"""End-to-end solvers and the combinatorial sub-solvers they plug in.

Guarantee targets in reports use the sub-solver ratio measured against
brute force on a fixed calibration corpus (``calibrate``), never a
theoretical constant.
"""

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from fmsm.analysis import brute_force_matroids, brute_force_opt, min_inf_norm_uniform, norm_report
from fmsm.continuous import ContinuousConfig, best_of_both, continuous_greedy
from fmsm.errors import ConfigurationError, InfeasibleError
from fmsm.instance import UniformSpec, feasible_witness, gen_random, is_monotone_spec
from fmsm.matroids import (
    ContractedMatroid,
    ExtendableFairMatroid,
    FreeMatroid,
    PartitionMatroid,
    RestrictedMatroid,
    from_mask,
    greedy_basis,
    max_cardinality_intersection,
    to_mask,
)
from fmsm.objectives import complement
from fmsm.rounding import IntersectionRounder, decomposition_compatible, swap_round_matroid

SOLVERS = ("two-pass-monotone", "two-pass-nonmonotone", "relax-round", "uniform-nonmonotone", "decomposable")


def _rng(*key):
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


# ---------------------------------------------------------------------------
# sub-solvers


def _fits(mask, matroids):
    return all(m.indep(mask) for m in matroids)


def _greedy(oracle, matroids, ground):
    """Add the best strictly improving element until none fits."""
    current, value = 0, oracle.value_mask(0)
    while True:
        best, best_gain = -1, 1e-12
        for e in ground:
            bit = 1 << e
            if current & bit or not _fits(current | bit, matroids):
                continue
            gain = oracle.value_mask(current | bit) - value
            if gain > best_gain:
                best, best_gain = e, gain
        if best < 0:
            return current, value
        current |= 1 << best
        value += best_gain


def local_search_pass(oracle, matroids, ground, t=1, epsilon=0.01, max_rounds=None):
    """Greedy start, then improving moves that add up to ``t`` elements and
    drop up to ``2t`` (a single drop is also a move).  A move is taken only
    if it gains more than ``epsilon * f(S) / n``."""
    n = max(1, len(ground))
    current, value = _greedy(oracle, matroids, ground)
    if t <= 0:
        return current
    max_rounds = max_rounds or 50 * n * n
    for _ in range(max_rounds):
        threshold = max(epsilon * value / n, 1e-12)
        inside = sorted(from_mask(current))
        outside = [e for e in ground if not current >> e & 1]
        improved = False
        for p in range(0, t + 1):
            for add in combinations(outside, p):
                amask = to_mask(add)
                for q in range(0 if p else 1, min(2 * t, len(inside)) + 1):
                    for drop in combinations(inside, q):
                        cand = (current & ~to_mask(drop)) | amask
                        if not _fits(cand, matroids):
                            continue
                        v = oracle.value_mask(cand)
                        if v > value + threshold:
                            current, value, improved = cand, v, True
                            break
                    if improved:
                        break
                if improved:
                    break
            if improved:
                break
        if not improved:
            return current
    return current


@dataclass(frozen=True)
class SubSolver:
    """Combinatorial routine for ``max f`` over one or two matroids.

    ``kind`` is ``"local_search"`` (``swap_size`` = t, ``epsilon``) or
    ``"random_greedy"`` (single matroid only).  With ``monotone=False`` local
    search runs twice, the second time on the elements left out by the
    first, and keeps the better set.
    """

    kind: str = "local_search"
    swap_size: int = 1
    epsilon: float = 0.01
    monotone: bool = False

    def __post_init__(self):
        if self.kind not in ("local_search", "random_greedy"):
            raise ConfigurationError(f"unknown sub-solver kind {self.kind!r}")
        if self.swap_size < 0 or self.epsilon < 0:
            raise ConfigurationError("swap size and epsilon must be non-negative")

    def solve(self, oracle, matroids, seed=0, ground=None):
        ground = list(range(oracle.n)) if ground is None else sorted(ground)
        if self.kind == "random_greedy":
            if len(matroids) != 1:
                raise ConfigurationError("random greedy handles a single matroid")
            return random_greedy(oracle, matroids[0], seed, ground)
        return two_matroid_local_search(
            matroids, oracle, self.swap_size, self.epsilon, seed, self.monotone, ground
        )


def two_matroid_local_search(matroids, objective, t=1, epsilon=0.01, seed=0, monotone=True, ground=None):
    """Local search over the intersection of the given matroids.

    ``t = 0`` returns the greedy start.  The non-monotone variant repeats
    the search on the complement of the first answer.  Deterministic; the
    seed is accepted for interface uniformity.
    """
    del seed
    matroids = list(matroids)
    if len(matroids) == 1:
        matroids.append(FreeMatroid(matroids[0].n))
    ground = list(range(objective.n)) if ground is None else sorted(ground)
    first = local_search_pass(objective, matroids, ground, t, epsilon)
    if monotone:
        return from_mask(first)
    rest = [e for e in ground if not first >> e & 1]
    second = local_search_pass(objective, matroids, rest, t, epsilon)
    if objective.value_mask(second) > objective.value_mask(first):
        return from_mask(second)
    return from_mask(first)


def random_greedy(oracle, matroid, seed=0, ground=None):
    """Random greedy for one matroid.

    Each round takes a largest-gain basis of what can still be added,
    padded with zero-gain dummy slots up to the remaining rank, and adds a
    uniformly random member (a dummy adds nothing).
    """
    rng = _rng(seed, 0x5EED)
    ground = list(range(oracle.n)) if ground is None else sorted(ground)
    allowed = RestrictedMatroid(matroid, ground)
    rank = len(greedy_basis(allowed, ground))
    current, value = 0, oracle.value_mask(0)
    for step in range(rank):
        gains = []
        for e in ground:
            bit = 1 << e
            if not current & bit and allowed.indep(current | bit):
                g = oracle.value_mask(current | bit) - value
                if g > 0:
                    gains.append((-g, e))
        gains.sort()
        chosen = []
        mask = current
        for _, e in gains:
            if allowed.indep(mask | 1 << e):
                mask |= 1 << e
                chosen.append(e)
        slots = rank - step
        pick = int(rng.integers(slots))
        if pick < len(chosen) and allowed.indep(current | 1 << chosen[pick]):
            current |= 1 << chosen[pick]
            value = oracle.value_mask(current)
        if not gains:
            break
    return from_mask(current)


# ---------------------------------------------------------------------------
# calibration


CALIBRATION_SEEDS = tuple(range(101, 113))


@lru_cache(maxsize=None)
def calibrate(sub, setting="two_matroid", seeds=CALIBRATION_SEEDS, reps=5, n=9):
    """Measured ratio of ``sub`` against brute force.

    ``setting`` is ``"two_matroid"`` (instance matroid intersected with the
    color upper bounds) or ``"one_matroid"``.  Objectives are coverage when
    the sub-solver is monotone and graph cut otherwise.  Returns the minimum
    over instances of the mean ratio over ``reps`` seeds.
    """
    objective_kind = "coverage" if sub.monotone else "graph_cut"
    worst = math.inf
    for seed in seeds:
        inst = gen_random(n, 3, "partition", objective_kind, seed)
        oracle = inst.objective_oracle()
        if setting == "two_matroid":
            mats = [inst.matroid_oracle, PartitionMatroid(n, inst.groups, inst.upper)]
        elif setting == "one_matroid":
            mats = [inst.matroid_oracle]
        else:
            raise ConfigurationError(f"unknown calibration setting {setting!r}")
        opt, _ = brute_force_matroids(oracle, mats)
        if opt <= 0:
            continue
        runs = reps if sub.kind == "random_greedy" else 1
        ratio = np.mean([oracle.value(sub.solve(oracle, mats, seed=r)) / opt for r in range(runs)])
        worst = min(worst, float(ratio))
    return worst if math.isfinite(worst) else 1.0


# ---------------------------------------------------------------------------
# reports


def fairness_interval(lower, upper, num_colors):
    """Per-color high-probability interval for the rounded color counts:
    ``[(1 - sqrt(3 ln(2C) / l)) l, (1 + sqrt(3 ln(2C) / u)) u]``."""
    lg = 3.0 * math.log(2 * num_colors)
    lo = [(1.0 - math.sqrt(lg / l)) * l if l > 0 else 0.0 for l in lower]
    hi = [(1.0 + math.sqrt(lg / u)) * u if u > 0 else 0.0 for u in upper]
    return lo, hi


@dataclass
class SolveReport:
    solver: str
    solution: list
    value: float
    counts: list
    lower: list
    upper: list
    independent: bool
    fair: bool
    guarantee: float
    seed: int
    calls: int
    alpha_hat: float = None
    opt: float = None
    wall_time: float = None
    extra: dict = field(default_factory=dict)

    @property
    def ratio(self):
        if self.opt is None:
            return None
        return self.value / self.opt if self.opt > 0 else 1.0

    @property
    def lower_violation(self):
        """Smallest ``count / lower`` over colors with a positive lower bound."""
        vals = [c / l for c, l in zip(self.counts, self.lower) if l > 0]
        return min(vals) if vals else 1.0

    @property
    def upper_violation(self):
        vals = [c / u for c, u in zip(self.counts, self.upper) if u > 0]
        return max(vals) if vals else 0.0

    def to_dict(self, timing=False):
        out = {
            "solver": self.solver,
            "solution": [int(e) for e in self.solution],
            "value": float(self.value),
            "counts": [int(c) for c in self.counts],
            "lower": [int(v) for v in self.lower],
            "upper": [int(v) for v in self.upper],
            "independent": bool(self.independent),
            "fair": bool(self.fair),
            "lower_violation": float(self.lower_violation),
            "upper_violation": float(self.upper_violation),
            "guarantee": float(self.guarantee),
            "alpha_hat": None if self.alpha_hat is None else float(self.alpha_hat),
            "opt": None if self.opt is None else float(self.opt),
            "ratio": None if self.ratio is None else float(self.ratio),
            "calls": int(self.calls),
            "seed": int(self.seed),
            "extra": self.extra,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out


def _report(inst, name, solution, oracle, guarantee, seed, started, alpha_hat=None, extra=None):
    solution = sorted(int(e) for e in solution)
    counts = [0] * inst.num_colors
    for e in solution:
        counts[inst.colors[e]] += 1
    return SolveReport(
        solver=name,
        solution=solution,
        value=float(oracle.value(solution)),
        counts=counts,
        lower=list(inst.lower),
        upper=list(inst.upper),
        independent=inst.matroid_oracle.is_independent(solution),
        fair=inst.is_fair(solution),
        guarantee=float(guarantee),
        seed=int(seed),
        calls=oracle.calls,
        alpha_hat=alpha_hat,
        wall_time=time.perf_counter() - started,
        extra=extra or {},
    )


def attach_opt(report, inst, max_n=None):
    report.opt, _ = brute_force_opt(inst, max_n)
    return report


# ---------------------------------------------------------------------------
# combinatorial pipeline


def fair_reservoir(inst):
    """A feasible set built from one greedy independent set per color.

    The largest set inside their union that is independent and holds at
    most ``lower_c`` elements of each color meets every lower bound exactly.
    Should the union fall short, the same intersection over the whole ground
    set decides feasibility.
    """
    matroid = inst.matroid_oracle
    union = 0
    for grp in inst.groups:
        union |= to_mask(greedy_basis(RestrictedMatroid(matroid, grp), sorted(grp)))
    caps = PartitionMatroid(inst.n, inst.groups, inst.lower)
    best = max_cardinality_intersection(RestrictedMatroid(matroid, from_mask(union)), caps)
    if len(best) == sum(inst.lower):
        return best
    best = feasible_witness(inst)
    if best is None:
        raise InfeasibleError("instance has no feasible set")
    return best


def _second_pass(inst, oracle, reservoir, splits, sub, seed):
    upper_matroid = PartitionMatroid(inst.n, inst.groups, inst.upper)
    outcomes = []
    for i, part in enumerate(splits):
        contracted = ContractedMatroid(inst.matroid_oracle, part)
        found = sub.solve(oracle, [upper_matroid, contracted], seed=int(seed) * 2 + i)
        counts = inst.color_counts(found)
        filled = set(found)
        for e in sorted(part):
            c = inst.colors[e]
            if e not in filled and counts[c] < inst.upper[c]:
                filled.add(e)
                counts[c] += 1
        outcomes.append((frozenset(found), frozenset(filled)))
    values = [(oracle.value(r), oracle.value(s)) for r, s in outcomes]
    best = max(range(len(outcomes)), key=lambda i: (values[i][1], -i))
    extra = {
        "reservoir": sorted(reservoir),
        "value_before_fill": [v[0] for v in values],
        "value_after_fill": [v[1] for v in values],
        "protected": [sorted(p) for p in splits],
    }
    return outcomes[best][1], extra


def two_pass_nonmonotone(inst, beta=0.5, sub=SubSolver(), seed=0):
    """Reservoir, two random protected sets of ``floor(beta l_c)`` elements
    per color, sub-solver on the color upper bounds and each contraction,
    then refill with protected elements while upper bounds allow."""
    if not 0.0 <= beta <= 0.5:
        raise ValueError("beta must lie in [0, 1/2]")
    started = time.perf_counter()
    oracle = inst.objective_oracle()
    reservoir = fair_reservoir(inst)
    rng = _rng(seed, 1)
    s1, s2 = set(), set()
    for grp, lo in zip(inst.groups, inst.lower):
        members = sorted(reservoir & grp)
        take = math.floor(beta * lo)
        first = set(int(e) for e in rng.choice(members, size=take, replace=False)) if take else set()
        rest = [e for e in members if e not in first]
        second = set(int(e) for e in rng.choice(rest, size=take, replace=False)) if take else set()
        s1 |= first
        s2 |= second
    solution, extra = _second_pass(inst, oracle, reservoir, [s1, s2], sub, seed)
    alpha = calibrate(SubSolver(sub.kind, sub.swap_size, sub.epsilon, False), "two_matroid")
    extra["beta"] = beta
    extra["floor_lower"] = [math.floor(beta * lo) for lo in inst.lower]
    return _report(inst, "two-pass-nonmonotone", solution, oracle, (1 - beta) * alpha / 2, seed, started, alpha, extra)


def two_pass_monotone(inst, sub=SubSolver(monotone=True), seed=0):
    """Deterministic halves: per color the first ``ceil(m/2)`` reservoir
    elements (ascending) go to the first part, the rest to the second."""
    if not is_monotone_spec(inst.objective):
        raise ConfigurationError("two_pass_monotone needs a monotone objective")
    started = time.perf_counter()
    oracle = inst.objective_oracle()
    reservoir = fair_reservoir(inst)
    s1, s2 = set(), set()
    for grp in inst.groups:
        members = sorted(reservoir & grp)
        half = math.ceil(len(members) / 2)
        s1 |= set(members[:half])
        s2 |= set(members[half:])
    sub = SubSolver(sub.kind, sub.swap_size, sub.epsilon, True)
    solution, extra = _second_pass(inst, oracle, reservoir, [s1, s2], sub, seed)
    alpha = calibrate(sub, "two_matroid")
    extra["floor_lower"] = [lo // 2 for lo in inst.lower]
    return _report(inst, "two-pass-monotone", solution, oracle, alpha / 2, seed, started, alpha, extra)


# ---------------------------------------------------------------------------
# relax and round


@dataclass
class Relaxation:
    """Fractional solution plus the guarantee target, reusable across seeds."""

    combination: object
    target: float
    monotone: bool
    r: float = None
    branch: str = None


def relax(inst, cfg=ContinuousConfig()):
    oracle = inst.objective_oracle()
    if is_monotone_spec(inst.objective):
        return Relaxation(continuous_greedy(inst, cfg, oracle), 1 - 1 / math.e, True)
    res = best_of_both(inst, cfg, oracle, detail=True)
    r = norm_report(inst).r
    return Relaxation(res.combination, max(0.0, (1 - r - cfg.epsilon) / 4), False, r, res.branch)


def relax_round_expected(inst, cfg=ContinuousConfig(), seed=0, relaxation=None):
    """Continuous relaxation then swap rounding in the matroid alone; color
    bounds hold in expectation."""
    started = time.perf_counter()
    relaxation = relaxation or relax(inst, cfg)
    solution = swap_round_matroid(relaxation.combination, inst.matroid_oracle, seed)
    lo, hi = fairness_interval(inst.lower, inst.upper, inst.num_colors)
    oracle = inst.objective_oracle()
    counts = inst.color_counts(solution)
    extra = {
        "interval_lower": lo,
        "interval_upper": hi,
        "within_interval": all(a - 1e-12 <= c <= b + 1e-12 for c, a, b in zip(counts, lo, hi)),
        "r": relaxation.r,
        "branch": relaxation.branch,
    }
    return _report(inst, "relax-round", solution, oracle, relaxation.target, seed, started, None, extra)


def decomposable_relaxation(inst, cfg=ContinuousConfig()):
    oracle = inst.objective_oracle()
    if not decomposition_compatible(inst, oracle):
        raise ConfigurationError("objective does not declare a decomposition over classes and colors")
    return relax(inst, cfg)


def decomposable_solve(inst, cfg=ContinuousConfig(), seed=0, relaxation=None, rounder=None):
    """Continuous relaxation then intersection swap rounding; the output is
    always feasible."""
    started = time.perf_counter()
    relaxation = relaxation or decomposable_relaxation(inst, cfg)
    oracle = inst.objective_oracle()
    rounder = rounder or IntersectionRounder(inst, relaxation.combination, oracle)
    solution = rounder.round(seed)
    extra = {"r": relaxation.r, "branch": relaxation.branch}
    return _report(inst, "decomposable", solution, oracle, relaxation.target, seed, started, None, extra)


# ---------------------------------------------------------------------------
# uniform matroid, non-monotone


HARTLEY_SCALE = 1 << 40


def _hartley_layout(xbar, colors):
    xbar = np.asarray(xbar, dtype=np.float64)
    if np.any(xbar < 0) or np.any(xbar > 1) or not np.all(np.isfinite(xbar)):
        raise ValueError("coordinates must lie in [0, 1]")
    colors = np.asarray(colors, dtype=np.int64)
    order = np.array(sorted(range(len(xbar)), key=lambda e: (int(colors[e]), e)), dtype=np.int64)
    lengths = np.array([int(Fraction(float(xbar[e])) * HARTLEY_SCALE) for e in order], dtype=np.int64)
    ends = np.cumsum(lengths)
    return order, ends - lengths, ends, colors


def _hartley_hits(starts, ends, alpha):
    """Rows of ``alpha``: whether ``Z * scale + alpha`` meets ``[start, end)``."""
    alpha = np.asarray(alpha, dtype=np.int64)[:, None]
    return (-((alpha - ends) // HARTLEY_SCALE)) - (-((alpha - starts) // HARTLEY_SCALE)) > 0


def hartley_sample(xbar, colors, seed=0):
    """Systematic sample with exact marginals and near-fixed group sizes.

    Elements are laid on a line color by color (index order inside a color)
    as intervals of length ``xbar_e``; every point of ``Z + alpha`` for a
    uniform offset ``alpha`` selects the element whose interval holds it.
    Lengths are quantized to multiples of ``2**-40`` so the size properties
    hold exactly in integer arithmetic.
    """
    order, starts, ends, colors = _hartley_layout(xbar, colors)
    num_colors = int(colors.max()) + 1 if colors.size else 0
    alpha = int(_rng(seed, 0xA11).integers(HARTLEY_SCALE))
    hit = _hartley_hits(starts, ends, [alpha])[0]
    groups = [set() for _ in range(num_colors)]
    for e in order[hit]:
        groups[int(colors[e])].add(int(e))
    return [frozenset(g) for g in groups]


def hartley_sample_batch(xbar, colors, num_draws, seed=0):
    """``num_draws`` independent samples as a boolean matrix (draws x n)."""
    order, starts, ends, _ = _hartley_layout(xbar, colors)
    alpha = _rng(seed, 0xA12).integers(HARTLEY_SCALE, size=num_draws)
    out = np.zeros((num_draws, len(order)), dtype=bool)
    out[:, order] = _hartley_hits(starts, ends, alpha)
    return out


def uniform_nonmonotone(inst, sub=SubSolver(kind="random_greedy"), seed=0, norms=None):
    """Better of two branches for a uniform matroid.

    Direct: solve over sets extendable to a fair set of size ``k``, then top
    up each color to its lower bound with uniformly random elements.
    Mirrored: solve ``g(S) = f(V - S)`` under caps ``|V_c| - l_c``, top up
    from a systematic sample of the smallest-norm mirrored point, and return
    the complement.
    """
    if not isinstance(inst.matroid, UniformSpec):
        raise ConfigurationError("uniform_nonmonotone needs a uniform matroid")
    started = time.perf_counter()
    oracle = inst.objective_oracle()
    norms = norms or min_inf_norm_uniform(inst)
    k = inst.matroid.k
    n = inst.n
    rng = _rng(seed, 2)

    # direct branch
    ext = ExtendableFairMatroid(inst.colors, inst.lower, inst.upper, k)
    direct = set(sub.solve(oracle, [ext], seed=int(seed) * 2))
    for grp, lo in zip(inst.groups, inst.lower):
        have = len(direct & grp)
        if have < lo:
            pool = sorted(grp - direct)
            direct |= set(int(e) for e in rng.choice(pool, size=lo - have, replace=False))

    # mirrored branch
    mirror = complement(oracle)
    caps = PartitionMatroid(n, inst.groups, [s - lo for s, lo in zip(inst.group_sizes, inst.lower)])
    chosen = set(sub.solve(mirror, [caps], seed=int(seed) * 2 + 1))
    sample = hartley_sample(norms.witness_complement, inst.colors, seed=int(seed) * 2 + 1)
    for grp, b in zip(inst.groups, sample):
        have = len(chosen & grp)
        if have < len(b):
            chosen |= set(sorted(b - chosen)[: len(b) - have])
    mirrored = set(range(n)) - chosen

    v_direct, v_mirror = oracle.value(direct), oracle.value(mirrored)
    solution, branch = (mirrored, "complement") if v_mirror > v_direct else (direct, "direct")
    alpha = calibrate(SubSolver(sub.kind, sub.swap_size, sub.epsilon, False), "one_matroid")
    extra = {
        "branch": branch,
        "value_direct": v_direct,
        "value_complement": v_mirror,
        "r": norms.r,
    }
    return _report(inst, "uniform-nonmonotone", solution, oracle, alpha * (1 - norms.r), seed, started, alpha, extra)
