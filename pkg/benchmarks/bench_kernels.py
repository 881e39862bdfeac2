"""Benchmark: numba expansion kernel vs the pure-numpy fallback.

Times the noncommutative product expansion on random polynomials of
growing size and prints a speedup table.  Run as::

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from cvpath import _kernels


def random_poly_arrays(rng, width, n_terms, max_exp):
    exps = rng.integers(0, max_exp + 1, size=(n_terms, 2 * width))
    exps = np.unique(exps, axis=0).astype(np.int64)
    coefs = (rng.standard_normal(len(exps))
             + 1j * rng.standard_normal(len(exps))).astype(np.complex128)
    return exps, coefs


def time_fn(fn, args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    if not _kernels.USE_NUMBA:
        print("numba is disabled (CVPATH_DISABLE_NUMBA); nothing to compare")
        return
    rng = np.random.default_rng(7)
    cases = [(1, 12, 4), (2, 40, 4), (3, 120, 4), (3, 250, 4)]
    # warm up the jit once so compilation is not timed
    ea, ca = random_poly_arrays(rng, 1, 4, 2)
    _kernels.expand_products(ea, ca, ea, ca)

    print(f"{'modes':>5} {'terms':>6} {'maxexp':>6} "
          f"{'numba [ms]':>11} {'numpy [ms]':>11} {'speedup':>8}")
    for width, n_terms, max_exp in cases:
        ea, ca = random_poly_arrays(rng, width, n_terms, max_exp)
        eb, cb = random_poly_arrays(rng, width, n_terms, max_exp)
        t_nb = time_fn(_kernels.expand_products, (ea, ca, eb, cb))
        t_py = time_fn(_kernels._expand_products_py, (ea, ca, eb, cb))
        print(f"{width:>5} {len(ea):>6} {max_exp:>6} "
              f"{t_nb * 1e3:>11.3f} {t_py * 1e3:>11.3f} {t_py / t_nb:>8.1f}")


if __name__ == "__main__":
    main()
