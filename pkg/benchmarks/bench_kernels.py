"""Timing comparison of the compiled and pure-numpy kernel backends.

Usage:  python benchmarks/bench_kernels.py [--repeats 2000]

Times the three per-iteration kernels plus one composed proximal-gradient
step over a sweep of problem sizes.  The compiled backend wins where Python
call overhead dominates (small d*m); the numpy backend catches up at larger
sizes where its BLAS-backed products amortize the overhead.
"""
import argparse
import importlib
import time

import numpy as np

from mtprior.kernels import build_arrays, pyimpl
from mtprior.model import (
    PriorMatrix,
    ProblemInstance,
    RegularizationParams,
    TaskData,
    validate_instance,
)

try:
    _core = importlib.import_module("mtprior.kernels._core")
except ImportError:
    _core = None


def make_instance(d, m, n, seed=0):
    rng = np.random.default_rng(seed)
    tasks = [TaskData(rng.standard_normal((n, d)), rng.standard_normal(n), i) for i in range(m)]
    rows = np.zeros((max(1, d // 10), d))
    for r in range(rows.shape[0]):
        rows[r, 2 * r] = 1.0
        rows[r, 2 * r + 1] = -1.0
    instance = ProblemInstance(tuple(tasks), PriorMatrix(rows), RegularizationParams(1.0, 1.0, 1.0))
    return validate_instance(instance)


def time_call(func, repeats):
    best = np.inf
    for _ in range(3):
        start = time.perf_counter()
        for _ in range(repeats):
            func()
        best = min(best, (time.perf_counter() - start) / repeats)
    return best


def bench_backend(impl, arrays, P, repeats):
    lam_over_eta = 0.01
    gradient = impl.smooth_grad(arrays.gram_eff, arrays.xty, arrays.eps, P)

    def prox_iteration():
        g = impl.smooth_grad(arrays.gram_eff, arrays.xty, arrays.eps, P)
        C = impl.shrink_rows(P - g / 50.0, lam_over_eta)
        return impl.smooth_value(arrays.gram_eff, arrays.xty, arrays.y_sqnorm, arrays.eps, C) \
            + impl.row_norm_sum(C)

    return {
        "value": time_call(lambda: impl.smooth_value(
            arrays.gram_eff, arrays.xty, arrays.y_sqnorm, arrays.eps, P), repeats),
        "grad": time_call(lambda: impl.smooth_grad(
            arrays.gram_eff, arrays.xty, arrays.eps, P), repeats),
        "shrink": time_call(lambda: impl.shrink_rows(gradient, lam_over_eta), repeats),
        "iteration": time_call(prox_iteration, repeats),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    sizes = [(5, 2, 20), (20, 5, 60), (50, 10, 100), (100, 20, 200)]
    kernels = ("value", "grad", "shrink", "iteration")
    header = f"{'size (d,m,n)':>16} {'kernel':>10} {'numpy':>12} {'compiled':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for d, m, n in sizes:
        instance = make_instance(d, m, n)
        arrays = build_arrays(instance)
        P = np.random.default_rng(1).standard_normal((d, m))
        py = bench_backend(pyimpl, arrays, P, args.repeats)
        cy = bench_backend(_core, arrays, P, args.repeats) if _core else None
        for kernel in kernels:
            py_us = py[kernel] * 1e6
            if cy is None:
                print(f"{str((d, m, n)):>16} {kernel:>10} {py_us:>10.2f}us {'n/a':>12} {'':>9}")
            else:
                cy_us = cy[kernel] * 1e6
                print(f"{str((d, m, n)):>16} {kernel:>10} {py_us:>10.2f}us {cy_us:>10.2f}us "
                      f"{py[kernel] / cy[kernel]:>8.2f}x")
    if _core is None:
        print("\ncompiled backend not built; showing numpy only")


if __name__ == "__main__":
    main()
