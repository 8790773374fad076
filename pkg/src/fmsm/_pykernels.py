"""Pure numpy implementations of the subset-table kernels.

Every table is indexed by a bitmask: bit ``i`` set means element ``i`` is in
the set.  Tables are built by doubling, so ``table[:2**i]`` covers the
subsets of the first ``i`` elements.
"""

import numpy as np


def subset_weights(x):
    x = np.asarray(x, dtype=np.float64)
    w = np.ones(1)
    for xi in x:
        w = np.concatenate((w * (1.0 - xi), w * xi))
    return w


def multilinear_value(table, x):
    table = np.asarray(table, dtype=np.float64)
    return float(np.dot(subset_weights(x), table))


def multilinear_gradient(table, x):
    table = np.asarray(table, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    grad = np.empty(n)
    for i in range(n):
        t = table.reshape(1 << (n - 1 - i), 2, 1 << i)
        diff = (t[:, 1, :] - t[:, 0, :]).ravel()
        others = subset_weights(np.delete(x, i))
        grad[i] = np.dot(others, diff)
    return grad


def coverage_table(cover, weights):
    cover = np.asarray(cover, dtype=bool)
    weights = np.asarray(weights, dtype=np.float64)
    n, u = cover.shape
    covered = np.zeros((1, u), dtype=bool)
    for i in range(n):
        covered = np.concatenate((covered, covered | cover[i]))
    return covered.astype(np.float64) @ weights


def cut_table(adj):
    adj = np.asarray(adj, dtype=np.float64)
    n = adj.shape[0]
    deg = adj.sum(axis=1)
    table = np.zeros(1)
    for i in range(n):
        masks = np.arange(1 << i)
        bits = (masks[:, None] >> np.arange(i)) & 1
        inner = bits @ adj[:i, i] if i else np.zeros(1)
        table = np.concatenate((table, table + deg[i] - 2.0 * inner))
    return table


def facility_table(values):
    values = np.asarray(values, dtype=np.float64)
    clients, n = values.shape
    best = np.zeros((1, clients))
    for i in range(n):
        best = np.concatenate((best, np.maximum(best, values[:, i])))
    return best.sum(axis=1)


def modular_table(weights):
    table = np.zeros(1)
    for w in np.asarray(weights, dtype=np.float64):
        table = np.concatenate((table, table + w))
    return table


def group_counts(n, groups):
    """Per-mask element counts of each group, shape ``(2**n, len(groups))``."""
    g = len(groups)
    member = np.zeros((n, g), dtype=np.int8)
    for j, grp in enumerate(groups):
        member[list(grp), j] = 1
    counts = np.zeros((1, g), dtype=np.int8)
    for i in range(n):
        counts = np.concatenate((counts, counts + member[i]))
    return counts


def bounded_masks(n, groups, lower, upper):
    if not groups:
        return np.ones(1 << n, dtype=bool)
    counts = group_counts(n, groups)
    lo = np.asarray(lower)
    hi = np.asarray(upper)
    return np.all((counts >= lo) & (counts <= hi), axis=1)


def submodularity_gap(table, n):
    """min over S and i != j outside S of f(S+i) + f(S+j) - f(S) - f(S+i+j)."""
    table = np.asarray(table, dtype=np.float64)
    gap = np.inf
    for j in range(n):
        for i in range(j):
            t = table.reshape(1 << (n - 1 - j), 2, 1 << (j - 1 - i), 2, 1 << i)
            d = t[:, 1, :, 0, :] + t[:, 0, :, 1, :] - t[:, 0, :, 0, :] - t[:, 1, :, 1, :]
            gap = min(gap, float(d.min()))
    return gap


def monotonicity_gap(table, n):
    """min over S and i outside S of f(S+i) - f(S)."""
    table = np.asarray(table, dtype=np.float64)
    gap = np.inf
    for i in range(n):
        t = table.reshape(1 << (n - 1 - i), 2, 1 << i)
        gap = min(gap, float((t[:, 1, :] - t[:, 0, :]).min()))
    return gap
