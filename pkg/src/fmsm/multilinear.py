"""Multilinear extension ``F(x) = E[f(R(x))]`` and its gradient.

Exact mode sums over the full subset table.  Sampled mode draws ``R(x)``
from a Philox stream keyed by ``(seed, iteration)`` so estimates are
reproducible regardless of how calls are scheduled.
"""

import math

import numpy as np

from fmsm import kernels

EXACT_LIMIT = 16


def default_samples(n):
    return max(1, int(math.ceil(64 * n * math.log(n + 1))))


def _stream(seed, iteration):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(iteration)])))


def _check_point(x, n):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise ValueError(f"point must have length {n}")
    if np.any(x < -1e-12) or np.any(x > 1 + 1e-12) or not np.all(np.isfinite(x)):
        raise ValueError("point must lie in [0, 1]^n")
    return np.clip(x, 0.0, 1.0)


def _masks(draws):
    weights = 1 << np.arange(draws.shape[1], dtype=object)
    return [int(m) for m in (draws.astype(object) @ weights)]


class MultilinearEstimator:
    """Evaluate ``F`` and ``grad F`` for a value oracle.

    ``mode`` is ``"exact"``, ``"sampled"`` or ``"auto"`` (exact when
    ``n <= 16``).
    """

    def __init__(self, oracle, mode="auto", num_samples=None, seed=0):
        if mode == "auto":
            mode = "exact" if oracle.n <= EXACT_LIMIT else "sampled"
        if mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {mode!r}")
        self.oracle = oracle
        self.mode = mode
        self.n = oracle.n
        self.num_samples = num_samples or default_samples(oracle.n)
        self.seed = seed

    def eval(self, x, iteration=0):
        x = _check_point(x, self.n)
        if self.mode == "exact":
            return float(kernels.multilinear_value(self.oracle.value_table(), x))
        return float(np.mean(self.sample_values(x, iteration)))

    def sample_values(self, x, iteration=0, num_samples=None):
        """Values ``f(R)`` for independent draws ``R ~ R(x)``."""
        x = _check_point(x, self.n)
        rng = _stream(self.seed, iteration)
        draws = rng.random((num_samples or self.num_samples, self.n)) < x
        return np.array([self.oracle.value_mask(m) for m in _masks(draws)])

    def grad(self, x, iteration=0):
        x = _check_point(x, self.n)
        if self.mode == "exact":
            return np.asarray(kernels.multilinear_gradient(self.oracle.value_table(), x))
        rng = _stream(self.seed, iteration)
        draws = rng.random((self.num_samples, self.n)) < x
        g = np.zeros(self.n)
        for m in _masks(draws):
            for i in range(self.n):
                bit = 1 << i
                g[i] += self.oracle.value_mask(m | bit) - self.oracle.value_mask(m & ~bit)
        return g / self.num_samples


def exact_value(oracle, x):
    return MultilinearEstimator(oracle, mode="exact").eval(x)


def indicator(n, elements):
    x = np.zeros(n)
    x[list(elements)] = 1.0
    return x

