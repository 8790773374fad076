"""Inequality descriptions of the feasible-set polytope and a small LP solver.

The polytope is ``{x in [0,1]^n : lo_r <= a_r . x <= hi_r}`` with one row per
color group and one per matroid block.  For uniform and partition matroids
the row families are two laminar families, so the matrix is totally
unimodular and every vertex is the indicator vector of a feasible set.
"""

from dataclasses import dataclass

import numpy as np

from fmsm.errors import ConfigurationError, InfeasibleError
from fmsm.instance import PartitionSpec, UniformSpec

TOL = 1e-9


@dataclass(frozen=True)
class PolytopeDescription:
    """``{x in [0,1]^n : lo <= A x <= hi}``.

    ``complemented`` records that this is the mirror image ``1 - P`` of a
    feasible-set polytope, so its vertices are complements of feasible sets.
    """

    A: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    complemented: bool = False

    @property
    def n(self):
        return self.A.shape[1]

    @classmethod
    def from_instance(cls, inst):
        n = inst.n
        rows, lo, hi = [], [], []
        for grp, l_c, u_c in zip(inst.groups, inst.lower, inst.upper):
            a = np.zeros(n)
            a[list(grp)] = 1.0
            rows.append(a)
            lo.append(l_c)
            hi.append(u_c)
        spec = inst.matroid
        if isinstance(spec, UniformSpec):
            rows.append(np.ones(n))
            lo.append(0)
            hi.append(spec.k)
        elif isinstance(spec, PartitionSpec):
            for block, cap in zip(spec.blocks, spec.caps):
                a = np.zeros(n)
                a[list(block)] = 1.0
                rows.append(a)
                lo.append(0)
                hi.append(cap)
        else:
            raise ConfigurationError("linear optimization supports uniform and partition matroids only")
        return cls(np.array(rows, dtype=np.float64).reshape(-1, n), np.array(lo, float), np.array(hi, float))

    def complement(self):
        """Description of ``{x : 1 - x in P}``."""
        total = self.A.sum(axis=1)
        return PolytopeDescription(self.A, total - self.hi, total - self.lo, not self.complemented)

    def contains(self, x, tol=TOL):
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < -tol) or np.any(x > 1 + tol):
            return False
        ax = self.A @ x
        return bool(np.all(ax >= self.lo - tol) and np.all(ax <= self.hi + tol))

    def residual(self, x):
        """Largest constraint violation of ``x`` (0 inside)."""
        x = np.asarray(x, dtype=np.float64)
        ax = self.A @ x
        parts = [np.maximum(-x, 0), np.maximum(x - 1, 0), np.maximum(self.lo - ax, 0), np.maximum(ax - self.hi, 0)]
        return float(max((p.max() if p.size else 0.0) for p in parts))


# ---------------------------------------------------------------------------
# bounded-variable primal simplex


class _Simplex:
    """Maximize ``c . z`` s.t. ``M z = 0`` and ``lb <= z <= ub``.

    Columns are structural variables, then one slack per row (``a . x - s = 0``),
    then one artificial per row for phase 1.  Entering and leaving choices
    follow Bland's rule (lowest index) so the method cannot cycle.
    """

    def __init__(self, M, lb, ub, basis, value, tol=TOL):
        self.M = M
        self.lb = lb
        self.ub = ub
        self.basis = list(basis)
        self.z = value
        self.tol = tol
        self._refresh()

    def _refresh(self):
        B = self.basis
        nonbasic = np.ones(self.M.shape[1], dtype=bool)
        nonbasic[B] = False
        self.nonbasic = nonbasic
        rhs = -self.M[:, nonbasic] @ self.z[nonbasic]
        self.MB = self.M[:, B]
        self.z[B] = np.linalg.solve(self.MB, rhs)

    def run(self, c, max_iter=10000):
        tol = self.tol
        for _ in range(max_iter):
            y = np.linalg.solve(self.MB.T, c[self.basis])
            d = c - y @ self.M
            enter, direction = -1, 0
            for j in np.flatnonzero(self.nonbasic):
                if self.ub[j] - self.lb[j] <= tol:
                    continue
                at_lower = self.z[j] <= self.lb[j] + tol
                at_upper = self.z[j] >= self.ub[j] - tol
                if d[j] > tol and not at_upper:
                    enter, direction = j, 1
                    break
                if d[j] < -tol and not at_lower:
                    enter, direction = j, -1
                    break
            if enter < 0:
                return True
            alpha = np.linalg.solve(self.MB, self.M[:, enter])
            flip = self.ub[enter] - self.lb[enter]
            theta, leave, leave_to = np.inf, -1, 0.0
            for i, b in enumerate(self.basis):
                rate = -direction * alpha[i]
                if rate < -tol:
                    step, bound = (self.z[b] - self.lb[b]) / -rate, self.lb[b]
                elif rate > tol:
                    step, bound = (self.ub[b] - self.z[b]) / rate, self.ub[b]
                else:
                    continue
                step = max(step, 0.0)
                if step < theta - tol or (step <= theta + tol and b < self.basis[leave]):
                    theta, leave, leave_to = step, i, bound
            if flip <= theta:
                theta, leave = flip, -1
            if not np.isfinite(theta):
                raise ConfigurationError("linear program is unbounded")
            if leave < 0:
                # bound flip
                self.z[enter] = self.ub[enter] if direction > 0 else self.lb[enter]
                self._refresh()
                continue
            out = self.basis[leave]
            self.z[enter] += direction * theta
            self.basis[leave] = enter
            self.z[out] = leave_to
            self._refresh()
        raise ConfigurationError("simplex iteration limit reached")


def _clamp_finite(v, lo, hi):
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


def solve_lp(desc, w, var_lower=None, var_upper=None, row_lower=None, row_upper=None, tol=TOL):
    """Maximize ``w . x`` over the polytope, optionally with tightened bounds.

    Returns the optimal basic solution ``x`` or raises InfeasibleError.
    """
    A = desc.A
    m, n = A.shape
    xl = np.zeros(n) if var_lower is None else np.asarray(var_lower, float)
    xu = np.ones(n) if var_upper is None else np.asarray(var_upper, float)
    rl = desc.lo if row_lower is None else np.asarray(row_lower, float)
    ru = desc.hi if row_upper is None else np.asarray(row_upper, float)
    if np.any(xl > xu + tol) or np.any(rl > ru + tol):
        raise InfeasibleError("empty bounds")

    # columns: x (n), slacks (m), artificials (m)
    N = n + 2 * m
    lb = np.concatenate((xl, rl, np.zeros(m)))
    ub = np.concatenate((xu, ru, np.full(m, np.inf)))
    z = np.zeros(N)
    z[:n] = xl
    resid = A @ xl
    for r in range(m):
        z[n + r] = _clamp_finite(resid[r], rl[r], ru[r])
    gap = resid - z[n : n + m]  # a.x - s; artificial must cancel it
    sign = np.where(gap > 0, -1.0, 1.0)
    M = np.hstack((A, -np.eye(m), np.diag(sign)))
    basis = list(range(n + m, N))

    if m == 0:
        x = np.where(np.asarray(w) > tol, xu, xl)
        return x.astype(float)

    sx = _Simplex(M, lb, ub, basis, z, tol)
    c1 = np.zeros(N)
    c1[n + m :] = -1.0
    sx.run(c1)
    if sx.z[n + m :].sum() > 1e-7:
        raise InfeasibleError("polytope is empty")

    # pin artificials at zero and pivot them out where possible
    sx.lb[n + m :] = 0.0
    sx.ub[n + m :] = 0.0
    sx.z[n + m :] = 0.0
    for i in range(m):
        b = sx.basis[i]
        if b < n + m:
            continue
        row = np.linalg.solve(sx.MB, sx.M)[i]
        for j in range(n + m):
            if sx.nonbasic[j] and abs(row[j]) > 1e-7:
                sx.basis[i] = j
                sx._refresh()
                break
    c2 = np.zeros(N)
    c2[:n] = w
    sx.run(c2)
    x = sx.z[:n].copy()
    x[np.abs(x) < tol] = 0.0
    x[np.abs(x - 1) < tol] = 1.0
    return x


def vertex_set(x, tol=1e-7):
    if np.any((x > tol) & (x < 1 - tol)):
        raise ConfigurationError("basic solution is not integral")
    return frozenset(int(i) for i in np.flatnonzero(x > 0.5))


def lp_maximize(desc, w):
    """Maximize ``w . x`` over the polytope; returns ``(x, set)`` at an integral vertex."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (desc.n,):
        raise ValueError(f"weight vector must have length {desc.n}")
    x = solve_lp(desc, w)
    return x, vertex_set(x)


# ---------------------------------------------------------------------------
# convex combinations


class ConvexCombination:
    """A point carried as weighted sets: ``x = sum_t weight_t * 1_{set_t}``."""

    def __init__(self, n, weights, sets, merge=True):
        self.n = n
        pairs = [(float(w), frozenset(s)) for w, s in zip(weights, sets) if w > 0]
        if merge:
            acc = {}
            for w, s in pairs:
                acc[s] = acc.get(s, 0.0) + w
            pairs = sorted(((w, s) for s, w in acc.items()), key=lambda p: (-p[0], sorted(p[1])))
        self.weights = np.array([w for w, _ in pairs])
        self.sets = [s for _, s in pairs]

    def __len__(self):
        return len(self.sets)

    def point(self):
        x = np.zeros(self.n)
        for w, s in zip(self.weights, self.sets):
            x[list(s)] += w
        return x

    def complemented(self):
        """The same weights over complement sets (represents ``1 - x``)."""
        full = frozenset(range(self.n))
        return ConvexCombination(self.n, self.weights, [full - s for s in self.sets])

    def normalized(self):
        return ConvexCombination(self.n, self.weights / self.weights.sum(), self.sets)

    def check(self, is_member, tol=1e-12):
        """Raise ValueError unless weights sum to one and every set passes ``is_member``."""
        if len(self.sets) == 0:
            raise ValueError("empty combination")
        if abs(self.weights.sum() - 1.0) > tol:
            raise ValueError(f"weights sum to {self.weights.sum()!r}")
        for s in self.sets:
            if not is_member(s):
                raise ValueError(f"support set {sorted(s)} is not feasible")
        return self


def _tight_bounds(desc, x, tol):
    ax = desc.A @ x
    rl = desc.lo.copy()
    ru = desc.hi.copy()
    at_lo = np.abs(ax - desc.lo) <= tol
    at_hi = np.abs(ax - desc.hi) <= tol
    ru[at_lo] = desc.lo[at_lo]
    rl[at_hi] = desc.hi[at_hi]
    xl = np.where(x >= 1 - tol, 1.0, 0.0)
    xu = np.where(x <= tol, 0.0, 1.0)
    return xl, xu, rl, ru


def _max_extension(desc, v, x):
    """Largest ``mu >= 1`` with ``v + mu (x - v)`` in the polytope."""
    d = x - v
    mu = np.inf
    for val, dv, lo, hi in (
        (v, d, np.zeros_like(v), np.ones_like(v)),
        (desc.A @ v, desc.A @ d, desc.lo, desc.hi),
    ):
        pos = dv > 1e-12
        neg = dv < -1e-12
        if np.any(pos):
            mu = min(mu, float(np.min((hi[pos] - val[pos]) / dv[pos])))
        if np.any(neg):
            mu = min(mu, float(np.min((lo[neg] - val[neg]) / dv[neg])))
    return mu


def decompose(desc, x, tol=1e-9, max_steps=None):
    """Write a point of an integral polytope as a convex combination of vertices.

    Each step takes a vertex of the smallest face containing the current
    point, then moves the point away from that vertex until a new constraint
    becomes tight, so the face dimension drops every round.
    """
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    if desc.residual(x) > 1e-7:
        raise ValueError("point lies outside the polytope")
    n = desc.n
    max_steps = max_steps or (n + desc.A.shape[0] + 2)
    weights, sets = [], []
    remaining = 1.0
    x[np.abs(x) < tol] = 0.0
    x[np.abs(x - 1) < tol] = 1.0
    for _ in range(max_steps):
        # points from a bisection carry small noise; widen the tight test until a step moves
        for tight in (1e-8, 1e-7, 1e-6, 1e-5):
            xl, xu, rl, ru = _tight_bounds(desc, x, tight)
            try:
                v = solve_lp(desc, np.zeros(n), xl, xu, rl, ru)
            except InfeasibleError:
                continue
            s = vertex_set(v)
            v = np.zeros(n)
            v[list(s)] = 1.0
            if np.max(np.abs(x - v)) <= 1e-6:
                break
            mu = _max_extension(desc, v, x)
            if np.isfinite(mu) and mu > 1 + 1e-9:
                break
        else:
            raise ConfigurationError("decomposition stalled")
        if np.max(np.abs(x - v)) <= 1e-6:
            weights.append(remaining)
            sets.append(s)
            break
        lam = 1.0 - 1.0 / mu
        weights.append(remaining * lam)
        sets.append(s)
        remaining *= 1.0 - lam
        x = v + mu * (x - v)
        x[np.abs(x) < tol] = 0.0
        x[np.abs(x - 1) < tol] = 1.0
        x = np.clip(x, 0.0, 1.0)
    else:
        raise ConfigurationError("decomposition did not terminate")
    w = np.array(weights)
    return ConvexCombination(n, w / w.sum(), sets)


def min_norm_point(desc, z):
    """A point of the polytope with every coordinate at most ``z``, or None."""
    try:
        return solve_lp(desc, np.zeros(desc.n), var_upper=np.full(desc.n, float(z)))
    except InfeasibleError:
        return None


def min_inf_norm(desc, tol=1e-7, max_iter=40):
    """Bisection for ``min ||x||_inf`` over the polytope.

    Returns ``(norm, witness)`` where ``norm`` is the witness's actual
    infinity norm.  Raises InfeasibleError if the polytope is empty.
    """
    witness = min_norm_point(desc, 1.0)
    if witness is None:
        raise InfeasibleError("polytope is empty")
    lo, hi = 0.0, 1.0
    zero = min_norm_point(desc, 0.0)
    if zero is not None:
        return 0.0, zero
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        point = min_norm_point(desc, mid)
        if point is None:
            lo = mid
        else:
            hi, witness = mid, point
    return float(np.max(witness)) if witness.size else 0.0, witness
