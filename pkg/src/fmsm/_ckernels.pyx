# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled subset-table kernels; same contract as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

cnp.import_array()


def subset_weights(x):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t size = 1, i, m
    out = np.empty(1 << n, dtype=np.float64)
    cdef double[::1] w = out
    cdef double xi
    w[0] = 1.0
    for i in range(n):
        xi = xv[i]
        for m in range(size):
            w[m + size] = w[m] * xi
            w[m] = w[m] * (1.0 - xi)
        size <<= 1
    return out


def multilinear_value(table, x):
    cdef const double[::1] t = np.ascontiguousarray(table, dtype=np.float64)
    cdef double[::1] w = subset_weights(x)
    cdef Py_ssize_t m
    cdef double acc = 0.0
    for m in range(t.shape[0]):
        acc += w[m] * t[m]
    return acc


def multilinear_gradient(table, x):
    cdef const double[::1] t = np.ascontiguousarray(table, dtype=np.float64)
    xarr = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xarr.shape[0]
    cdef Py_ssize_t half = 1 << (n - 1) if n > 0 else 0
    cdef Py_ssize_t i, r, m, bit
    cdef double acc
    cdef double[::1] w
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] g = out
    for i in range(n):
        w = subset_weights(np.delete(xarr, i))
        bit = 1 << i
        acc = 0.0
        for r in range(half):
            # insert a zero at bit position i
            m = ((r >> i) << (i + 1)) | (r & (bit - 1))
            acc += w[r] * (t[m | bit] - t[m])
        g[i] = acc
    return out


def coverage_table(cover, weights):
    cdef const cnp.uint8_t[:, ::1] cv = np.ascontiguousarray(cover, dtype=np.uint8)
    cdef const double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = cv.shape[0], u = cv.shape[1]
    cdef Py_ssize_t words = (u + 63) // 64
    cdef Py_ssize_t size = 1 << n, m, top, prev, k, w
    packed = np.zeros((max(n, 1), max(words, 1)), dtype=np.uint64)
    cdef cnp.uint64_t[:, ::1] pc = packed
    for top in range(n):
        for k in range(u):
            if cv[top, k]:
                pc[top, k >> 6] |= (<cnp.uint64_t>1) << (k & 63)
    state = np.zeros((size, max(words, 1)), dtype=np.uint64)
    cdef cnp.uint64_t[:, ::1] covered = state
    out = np.zeros(size, dtype=np.float64)
    cdef double[::1] t = out
    cdef double acc
    cdef cnp.uint64_t fresh
    for top in range(n):
        for prev in range(1 << top):
            m = prev | (1 << top)
            acc = t[prev]
            for w in range(words):
                fresh = pc[top, w] & ~covered[prev, w]
                covered[m, w] = covered[prev, w] | pc[top, w]
                while fresh:
                    acc += wt[(w << 6) + __builtin_ctzll(fresh)]
                    fresh &= fresh - 1
            t[m] = acc
    return out


def cut_table(adj):
    cdef const double[:, ::1] a = np.ascontiguousarray(adj, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t size = 1 << n, top, prev, j, hb
    out = np.zeros(size, dtype=np.float64)
    cdef double[::1] t = out
    scratch = np.zeros(max(size >> 1, 1), dtype=np.float64)
    cdef double[::1] inner = scratch
    cdef double deg
    for top in range(n):
        deg = 0.0
        for j in range(n):
            deg += a[top, j]
        # inner[prev] = total weight between top and the elements of prev
        inner[0] = 0.0
        t[1 << top] = deg
        hb = 0
        for prev in range(1, 1 << top):
            if prev >> (hb + 1):
                hb += 1
            inner[prev] = inner[prev ^ (1 << hb)] + a[top, hb]
            t[prev | (1 << top)] = t[prev] + deg - 2.0 * inner[prev]
    return out


def facility_table(values):
    cdef const double[:, ::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t clients = v.shape[0], n = v.shape[1]
    cdef Py_ssize_t size = 1 << n, m, top, prev, c
    state = np.zeros((size, clients), dtype=np.float64)
    cdef double[:, ::1] best = state
    out = np.zeros(size, dtype=np.float64)
    cdef double[::1] t = out
    cdef double acc, b
    for m in range(1, size):
        top = 0
        while (m >> (top + 1)) != 0:
            top += 1
        prev = m ^ (1 << top)
        acc = 0.0
        for c in range(clients):
            b = best[prev, c]
            if v[c, top] > b:
                b = v[c, top]
            best[m, c] = b
            acc += b
        t[m] = acc
    return out


def modular_table(weights):
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t size = 1 << n, m, top
    out = np.zeros(size, dtype=np.float64)
    cdef double[::1] t = out
    for m in range(1, size):
        top = 0
        while (m >> (top + 1)) != 0:
            top += 1
        t[m] = t[m ^ (1 << top)] + w[top]
    return out


def group_counts(n, groups):
    cdef Py_ssize_t g = len(groups)
    member_arr = np.zeros((n, g), dtype=np.int8)
    for j, grp in enumerate(groups):
        member_arr[list(grp), j] = 1
    cdef cnp.int8_t[:, ::1] member = member_arr
    cdef Py_ssize_t size = 1 << n, m, top, k
    out = np.zeros((size, g), dtype=np.int8)
    cdef cnp.int8_t[:, ::1] counts = out
    for m in range(1, size):
        top = 0
        while (m >> (top + 1)) != 0:
            top += 1
        for k in range(g):
            counts[m, k] = counts[m ^ (1 << top), k] + member[top, k]
    return out


def bounded_masks(n, groups, lower, upper):
    cdef Py_ssize_t size = 1 << n
    if not groups:
        return np.ones(size, dtype=bool)
    cdef cnp.int8_t[:, ::1] counts = group_counts(n, groups)
    cdef const cnp.int64_t[::1] lo = np.ascontiguousarray(lower, dtype=np.int64)
    cdef const cnp.int64_t[::1] hi = np.ascontiguousarray(upper, dtype=np.int64)
    cdef Py_ssize_t g = counts.shape[1], m, k
    out = np.ones(size, dtype=np.uint8)
    cdef cnp.uint8_t[::1] ok = out
    for m in range(size):
        for k in range(g):
            if counts[m, k] < lo[k] or counts[m, k] > hi[k]:
                ok[m] = 0
                break
    return out.view(bool)


def submodularity_gap(table, n):
    cdef const double[::1] t = np.ascontiguousarray(table, dtype=np.float64)
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t size = 1 << nn, m, i, j
    cdef double gap = INFINITY, d
    for m in range(size):
        for i in range(nn):
            if m & (1 << i):
                continue
            for j in range(i + 1, nn):
                if m & (1 << j):
                    continue
                d = t[m | (1 << i)] + t[m | (1 << j)] - t[m] - t[m | (1 << i) | (1 << j)]
                if d < gap:
                    gap = d
    return gap


def monotonicity_gap(table, n):
    cdef const double[::1] t = np.ascontiguousarray(table, dtype=np.float64)
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t size = 1 << nn, blk, base, lo, i, bit
    cdef double gap = INFINITY, d
    for i in range(nn):
        bit = 1 << i
        for blk in range(size >> (i + 1)):
            base = blk << (i + 1)
            for lo in range(base, base + bit):
                d = t[lo | bit] - t[lo]
                if d < gap:
                    gap = d
    return gap
