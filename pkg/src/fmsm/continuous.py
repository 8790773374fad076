"""Continuous optimizers for the multilinear relaxation over the feasible-set polytope.

Outputs are carried as ConvexCombination objects whose support sets are
feasible, so they can be handed straight to swap rounding.
"""

import math
from dataclasses import dataclass

import numpy as np

from fmsm.errors import ConfigurationError
from fmsm.instance import is_monotone_spec
from fmsm.multilinear import MultilinearEstimator
from fmsm.objectives import complement
from fmsm.polytope import ConvexCombination, PolytopeDescription, decompose, lp_maximize, min_inf_norm


@dataclass(frozen=True)
class ContinuousConfig:
    epsilon: float = 0.05
    mode: str = "auto"
    num_samples: int = None
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @property
    def steps(self):
        return max(1, math.ceil(1.0 / self.epsilon - 1e-12))

    def estimator(self, oracle):
        return MultilinearEstimator(oracle, self.mode, self.num_samples, self.seed)


def greedy_path(oracle, desc, cfg, history=None):
    """Continuous greedy on an arbitrary oracle and polytope description."""
    est = cfg.estimator(oracle)
    T = cfg.steps
    x = np.zeros(desc.n)
    sets = []
    for t in range(T):
        _, chosen = lp_maximize(desc, est.grad(x, iteration=t))
        sets.append(chosen)
        x[list(chosen)] += 1.0 / T
        if history is not None:
            history.append(est.eval(x, iteration=T + t))
    return ConvexCombination(desc.n, [1.0 / T] * T, sets)


def frank_wolfe_path(oracle, desc, cfg, start=None):
    """Frank-Wolfe variant for non-monotone objectives.

    Starts at a point of smallest infinity norm and, for ``ceil(ln 2 / eps)``
    rounds, moves ``y <- (1 - d) y + d s`` with ``s`` the LP maximizer of the
    gradient and ``d = ln 2 / rounds``.  The start point is decomposed into
    vertices so the result stays a combination of sets.
    """
    est = cfg.estimator(oracle)
    if start is None:
        _, y0 = min_inf_norm(desc)
        start = decompose(desc, y0)
    rounds = max(1, math.ceil(math.log(2) / cfg.epsilon - 1e-12))
    delta = math.log(2) / rounds
    weights = list(start.weights)
    sets = list(start.sets)
    y = start.point()
    for t in range(rounds):
        _, s = lp_maximize(desc, est.grad(y, iteration=t))
        weights = [w * (1.0 - delta) for w in weights]
        weights.append(delta)
        sets.append(s)
        y *= 1.0 - delta
        y[list(s)] += delta
    w = np.array(weights)
    return ConvexCombination(desc.n, w / w.sum(), sets)


def _require_lp_matroid(inst):
    return PolytopeDescription.from_instance(inst)


def continuous_greedy(inst, cfg=ContinuousConfig(), oracle=None, history=None):
    """Continuous greedy for monotone objectives; ``1/T``-weighted vertex sets."""
    if oracle is None:
        if not is_monotone_spec(inst.objective):
            raise ConfigurationError("continuous greedy needs a monotone objective")
        oracle = inst.objective_oracle()
    elif not oracle.monotone:
        raise ConfigurationError("continuous greedy needs a monotone objective")
    cc = greedy_path(oracle, _require_lp_matroid(inst), cfg, history)
    return cc.check(inst.is_feasible, 1e-9)


def nonmonotone_fw(inst, cfg=ContinuousConfig(), oracle=None):
    oracle = oracle or inst.objective_oracle()
    cc = frank_wolfe_path(oracle, _require_lp_matroid(inst), cfg)
    return cc.check(inst.is_feasible, 1e-9)


@dataclass
class BothResult:
    combination: ConvexCombination
    branch: str
    direct_value: float
    complement_value: float


def best_of_both(inst, cfg=ContinuousConfig(), oracle=None, detail=False):
    """Run the Frank-Wolfe variant on the problem and on its complement.

    The complement run optimizes ``g(S) = f(V - S)`` over ``1 - P``; its sets
    are mapped back to their complements.  The combination with the larger
    extension value is returned (ties keep the direct run).
    """
    oracle = oracle or inst.objective_oracle()
    desc = _require_lp_matroid(inst)
    direct = frank_wolfe_path(oracle, desc, cfg)
    mirrored = frank_wolfe_path(complement(oracle), desc.complement(), cfg).complemented()
    est = cfg.estimator(oracle)
    v_direct = est.eval(direct.point(), iteration=-1 % (1 << 32))
    v_mirror = est.eval(mirrored.point(), iteration=-1 % (1 << 32))
    if v_mirror > v_direct + 1e-12:
        res = BothResult(mirrored, "complement", v_direct, v_mirror)
    else:
        res = BothResult(direct, "direct", v_direct, v_mirror)
    res.combination.check(inst.is_feasible, 1e-9)
    return res if detail else res.combination
