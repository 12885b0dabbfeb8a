"""Compare the compiled kernels with the numpy/pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--sizes 200 1000 4000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from regdeloc import _pykernels, generate_random_regular

try:
    from regdeloc import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(g, coeffs, block):
    nbrs, scale = g.neighbors, 1 / np.sqrt(g.d)
    return {
        "girth(limit=12)": lambda m: m.bfs_girth(nbrs, 12),
        "shared_cycle(limit=8)": lambda m: m.shared_edge_cycle_length(nbrs, 8),
        f"sweep(deg={len(coeffs) - 1}, vec)": lambda m: m.chebyshev_sweep(nbrs, scale, block[:, 0].copy(), coeffs),
        f"sweep(deg={len(coeffs) - 1}, {block.shape[1]} cols)": lambda m: m.chebyshev_sweep(nbrs, scale, block, coeffs),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 4000])
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--degree", type=int, default=300, help="Chebyshev series degree")
    ap.add_argument("--cols", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the fallback is timed")
    rng = np.random.default_rng(0)
    coeffs = rng.standard_normal(args.degree + 1) / args.degree
    print(f"{'n':>6}  {'kernel':<28}{'python [s]':>12}{'cython [s]':>12}{'speedup':>9}")
    for n in args.sizes:
        g = generate_random_regular(n, args.d, seed=n)
        block = rng.standard_normal((n, args.cols))
        for name, fn in cases(g, coeffs, block).items():
            tp = best_of(lambda: fn(_pykernels), args.repeat)
            if _ckernels is None:
                print(f"{n:>6}  {name:<28}{tp:>12.4f}{'-':>12}{'-':>9}")
                continue
            tc = best_of(lambda: fn(_ckernels), args.repeat)
            print(f"{n:>6}  {name:<28}{tp:>12.4f}{tc:>12.4f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
