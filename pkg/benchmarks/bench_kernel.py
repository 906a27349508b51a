#!/usr/bin/env python3
"""Benchmark the compiled Jacobi kernel against the pure numpy fallback.

Times hermitian eigendecompositions across sizes and prints a table with the
numpy.linalg.eigh reference for scale. Run after building the extension:

    python benchmarks/bench_kernel.py [--sizes 8,16,32,64] [--repeats 5]
"""

import argparse
import time

import numpy as np

from opalg._kernel import backend_name
from opalg._kernel.jacobi_pure import hermitian_eigh as pure_eigh

try:
    from opalg._kernel._jacobi import hermitian_eigh as compiled_eigh
except ImportError:
    compiled_eigh = None


def timeit(fn, h, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(h)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,32,64,96")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    print(f"active backend: {backend_name()}")
    if compiled_eigh is None:
        print("compiled kernel not built; showing the pure fallback only")
    header = f"{'n':>5s} {'pure [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s} {'lapack [ms]':>12s}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = 0.5 * (a + a.conj().T)
        t_pure = timeit(lambda m: pure_eigh(m, 1e-12), h, args.repeats)
        t_lapack = timeit(np.linalg.eigh, h, args.repeats)
        if compiled_eigh is not None:
            t_comp = timeit(lambda m: compiled_eigh(m, 1e-12), h, args.repeats)
            w1, _ = compiled_eigh(h, 1e-12)
            w2, _ = pure_eigh(h, 1e-12)
            assert np.max(np.abs(w1 - w2)) < 1e-10, "backends disagree"
            print(
                f"{n:5d} {t_pure * 1e3:12.3f} {t_comp * 1e3:14.3f} "
                f"{t_pure / t_comp:7.1f}x {t_lapack * 1e3:12.3f}"
            )
        else:
            print(f"{n:5d} {t_pure * 1e3:12.3f} {'-':>14s} {'-':>8s} {t_lapack * 1e3:12.3f}")


if __name__ == "__main__":
    main()
