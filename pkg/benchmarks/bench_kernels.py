"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --n 16 --repeat 5

Each row checks that both backends agree before timing them.
"""

import argparse
import json
import timeit

import numpy as np

from fmsm import kernels


def cases(n, rng):
    x = rng.random(n)
    cover = rng.random((n, 2 * n)) < 0.2
    weights = rng.random(2 * n)
    adj = np.triu((rng.random((n, n)) < 0.3).astype(float), 1)
    adj = adj + adj.T
    values = rng.random((6, n))
    table = kernels.BACKENDS["python"].coverage_table(cover, weights)
    small = max(2, n - 4)
    small_table = np.ascontiguousarray(table[: 1 << small])
    groups = [list(range(0, n, 2)), list(range(1, n, 2))]
    return {
        "multilinear_value": (table, x),
        "multilinear_gradient": (small_table, x[:small]),
        "coverage_table": (cover, weights),
        "cut_table": (adj,),
        "facility_table": (values,),
        "bounded_masks": (n, groups, [1, 1], [n // 3, n // 3]),
        "submodularity_gap": (small_table, small),
        "monotonicity_gap": (table, n),
    }


def run(n=16, repeat=5, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    backends = kernels.BACKENDS
    for name, args in cases(n, rng).items():
        outs = {b: getattr(mod, name)(*args) for b, mod in backends.items()}
        ref = np.asarray(outs["python"])
        row = {"kernel": name, "n": n}
        for b, mod in backends.items():
            if not np.allclose(np.asarray(outs[b]), ref, atol=1e-9):
                raise AssertionError(f"{name}: {b} disagrees with the numpy fallback")
            fn = getattr(mod, name)
            row[b] = min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="print rows as JSON")
    args = p.parse_args(argv)
    rows = run(args.n, args.repeat, args.seed)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<22}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for r in rows:
        cy = f"{1e3 * r['cython']:14.3f}" if "cython" in r else f"{'n/a':>14}"
        sp = f"{r['speedup']:10.1f}" if "speedup" in r else f"{'':>10}"
        print(f"{r['kernel']:<22}{1e3 * r['python']:14.3f}{cy}{sp}")


if __name__ == "__main__":
    main()
