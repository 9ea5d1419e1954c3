#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot kernels (Metropolis build, weighted consensus step,
Laplacian consensus step) on a random graph under both backends.

    python benchmarks/backends_bench.py [n] [max_degree] [iters]
"""
import sys
import time

import numpy as np

from colme import _kernels_numba, _kernels_numpy
from colme.graphs import build_random_graph

n = int(sys.argv[1]) if len(sys.argv) > 1 else 5000
r = int(sys.argv[2]) if len(sys.argv) > 2 else 10
iters = int(sys.argv[3]) if len(sys.argv) > 3 else 2000


def time_us(fn, *args, repeat=iters):
    fn(*args)  # warm up (JIT compile / cache touch)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat * 1e6


def main():
    g = build_random_graph(n, r, seed=42)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    mu = rng.standard_normal(n)
    wdata, wdiag, _ = _kernels_numpy.metropolis_build(g.indptr, g.indices, g.degrees)

    print(f"n={n} edges={g.n_edges} iters={iters}")
    print(f"{'kernel':<26} {'numba_us':>10} {'numpy_us':>10} {'speedup':>8}")
    cases = [
        ("metropolis_build",
         (g.indptr, g.indices, g.degrees)),
        ("consensus_step_weighted",
         (g.indptr, g.indices, wdata, wdiag, x, mu, 0.9)),
        ("consensus_step_laplacian",
         (g.indptr, g.indices, g.degrees, x, mu, 0.9, 0.1)),
    ]
    for name, args in cases:
        t_nb = time_us(getattr(_kernels_numba, name), *args)
        t_np = time_us(getattr(_kernels_numpy, name), *args)
        print(f"{name:<26} {t_nb:>10.2f} {t_np:>10.2f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
