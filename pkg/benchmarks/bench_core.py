"""Benchmark: compiled counting kernels vs the numpy fallback.

The pair/neighbor counters dominate the pathwise experiments (every
replication of a radius-indicator U-statistic is one pair count).  This
script times both backends on synthetic clouds and reports the speedup;
results are asserted equal before timing.

Usage:
    python benchmarks/bench_core.py [--sizes 300,1000,3000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from pustat import _core_py

try:
    from pustat import _core
except ImportError:
    _core = None


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="300,1000,3000")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--dim", type=int, default=1)
    parser.add_argument("--radius", type=float, default=0.05)
    args = parser.parse_args()

    if _core is None:
        print("compiled extension not built; timing the numpy fallback only")

    rng = np.random.default_rng(0)
    sizes = [int(s) for s in args.sizes.split(",")]
    header = f"{'n':>6} {'kernel':>10} {'numpy (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        pts = np.ascontiguousarray(rng.random((n, args.dim)))
        queries = np.ascontiguousarray(rng.random((max(n // 4, 1), args.dim)))
        cases = [
            ("pairs", lambda m=_core_py: m.count_pairs_within(pts, args.radius),
             None if _core is None else (lambda: _core.count_pairs_within(pts, args.radius))),
            ("neighbors", lambda m=_core_py: m.count_neighbors(pts, queries, args.radius),
             None if _core is None else (lambda: _core.count_neighbors(pts, queries, args.radius))),
        ]
        for name, slow, fast in cases:
            if fast is not None:
                a, b = slow(), fast()
                same = (a == b) if name == "pairs" else bool(np.array_equal(a, np.asarray(b)))
                if not same:
                    raise SystemExit(f"backend mismatch for {name} at n={n}")
            t_slow = _best_of(slow, args.repeats) * 1e3
            if fast is None:
                print(f"{n:>6} {name:>10} {t_slow:>12.3f} {'-':>14} {'-':>8}")
            else:
                t_fast = _best_of(fast, args.repeats) * 1e3
                print(f"{n:>6} {name:>10} {t_slow:>12.3f} {t_fast:>14.3f} {t_slow / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
