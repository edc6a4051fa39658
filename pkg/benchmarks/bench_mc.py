#!/usr/bin/env python3
"""Benchmark the compiled Monte Carlo DP kernel against the numpy fallback.

Usage: python3 benchmarks/bench_mc.py [n_samples]
"""
import sys
import time

import numpy as np

from grsklab import _mc_numpy
from grsklab.sampling import KERNEL, ParameterSet, mc_laplace

try:
    from grsklab import _mckernel
except ImportError:
    _mckernel = None


def time_kernel(kernel, w, points, us, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        kernel.mc_chunk(w, points, us)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    points = [(1, 3), (3, 1)]
    us = [0.7, 1.3]
    rng = np.random.default_rng(0)
    w = 1.0 / rng.standard_gamma(1.0, size=(n, 3, 3))

    t_np = time_kernel(_mc_numpy, w, points, us)
    print(f"numpy fallback : {n / t_np:12.0f} samples/s  ({t_np:.3f} s)")
    if _mckernel is not None:
        t_cy = time_kernel(_mckernel, w, points, us)
        print(f"compiled kernel: {n / t_cy:12.0f} samples/s  ({t_cy:.3f} s)")
        print(f"speedup        : {t_np / t_cy:.2f}x")
        a = _mc_numpy.mc_chunk(w[:1000], points, us)
        b = _mckernel.mc_chunk(w[:1000], points, us)
        print(f"max |diff|     : {np.max(np.abs(a - b)):.3e}")
    else:
        print("compiled kernel: not built")

    print(f"\nactive kernel in grsklab.sampling: {KERNEL}")
    t0 = time.perf_counter()
    est = mc_laplace(points, us, ParameterSet.flat(1.0, 3, 3), n_samples=n, seed=1)
    dt = time.perf_counter() - t0
    print(f"mc_laplace end-to-end: {est.mean:.6f} +/- {est.stderr:.2e}  ({dt:.3f} s)")


if __name__ == "__main__":
    main()
