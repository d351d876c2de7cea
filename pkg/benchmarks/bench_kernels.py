"""Compiled-vs-fallback kernel timings.

Imports both kernel modules directly (no env var juggling) and times the
hot entry points at the sizes the experiments actually use.  Run with

    python3 benchmarks/bench_kernels.py [--limit 1000000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from friabilis import _kernels_py
from friabilis._backend import get_backend

try:
    from friabilis import _kernels
except ImportError:
    _kernels = None


def best_of(repeat, fn, *args):
    out = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        out = min(out, time.perf_counter() - t0)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--limit", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    limit = args.limit

    primes = np.array([2, 3, 5, 7, 11, 13, 17], dtype=np.int64)
    exps = np.array([6, 4, 3, 2, 2, 1, 1], dtype=np.int64)
    values = np.random.default_rng(0).normal(size=limit)

    cases = [
        ("prime_mask", (limit,)),
        ("spf_sieve", (limit,)),
        ("moment_scan", (limit,)),
        ("tau_sieve", (limit,)),
        ("small_divisor_count_sieve", (limit, 0.5)),
        ("divisor_products", (primes, exps)),
        ("kahan_sum", (values,)),
    ]

    print(f"active backend: {get_backend()}   limit = {limit:,}")
    header = f"{'kernel':<28}{'python':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call_args in cases:
        py = best_of(args.repeat, getattr(_kernels_py, name), *call_args)
        if _kernels is None:
            print(f"{name:<28}{py:>11.4f}s{'-':>12}{'-':>10}")
            continue
        cy = best_of(args.repeat, getattr(_kernels, name), *call_args)
        print(f"{name:<28}{py:>11.4f}s{cy:>11.4f}s{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
