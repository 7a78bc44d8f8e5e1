#!/usr/bin/env python3
"""Compare the numpy and compiled kernel backends on realistic shapes.

Run from the repository root after installing the package:

    python benchmarks/bench_kernels.py [--repeats 7] [--k 20000]

Prints median wall time per kernel and backend plus the speedup of the
compiled path. Honest numbers: on BLAS-shaped work (full sample
covariance) the numpy backend can win; the compiled path is built for
the fused per-snapshot reductions.
"""
import argparse
import statistics
import time

import numpy as np

from sepbeam._kernels import _python

try:
    from sepbeam._kernels import _compiled
except ImportError:
    _compiled = None


def bench(fn, args, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=7)
    ap.add_argument("--k", type=int, default=20_000, help="snapshots per block")
    ap.add_argument("--n-h", type=int, default=8)
    ap.add_argument("--n-v", type=int, default=8)
    ap.add_argument("--grid", type=int, default=361, help="pattern grid points per axis")
    args = ap.parse_args()

    if _compiled is None:
        print("compiled extension not built; nothing to compare")
        return 1

    rng = np.random.default_rng(0)
    n_h, n_v, k = args.n_h, args.n_v, args.k
    cube = np.ascontiguousarray(
        rng.standard_normal((n_h, n_v, k)) + 1j * rng.standard_normal((n_h, n_v, k))
    )
    x = np.ascontiguousarray(cube.reshape(n_h * n_v, k))
    s = np.ascontiguousarray(rng.standard_normal(k) + 1j * rng.standard_normal(k))
    w_h = np.ascontiguousarray(rng.standard_normal(n_h) + 1j * rng.standard_normal(n_h))
    w_v = np.ascontiguousarray(rng.standard_normal(n_v) + 1j * rng.standard_normal(n_v))
    w_mat = np.ascontiguousarray(rng.standard_normal((n_h, n_v)) + 1j * rng.standard_normal((n_h, n_v)))
    grid = np.linspace(-1.0, 1.0, args.grid)

    cases = [
        ("sample_second_order", (x, s)),
        ("cofiltered_second_order", (cube, w_v, s, 0)),
        ("bilinear_output", (cube, w_h, w_v)),
        ("af_grid_full", (w_mat, grid, grid)),
        ("af_grid_separable", (w_h, w_v, grid, grid)),
    ]

    print(f"shapes: cube ({n_h}, {n_v}, {k}), grid {args.grid}x{args.grid}, "
          f"median of {args.repeats}")
    print(f"{'kernel':<26} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for name, fn_args in cases:
        t_np = bench(getattr(_python, name), fn_args, args.repeats)
        t_c = bench(getattr(_compiled, name), fn_args, args.repeats)
        print(f"{name:<26} {t_np * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms {t_np / t_c:>7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
