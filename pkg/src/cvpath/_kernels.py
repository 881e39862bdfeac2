"""Hot kernels for noncommutative term expansion.

The product of two canonical monomials factorizes over modes; within a mode
``j`` the reordering of ``p^b1 q^a2`` follows

    p^b q^a = sum_k C(b,k) C(a,k) k! (-2i)^k q^(a-k) p^(b-k)

under the commutator [q, p] = 2i.  ``expand_products`` applies this to every
term pair of two polynomials and emits the raw (unaggregated) expansion.

The numba-jitted kernel is the default; set ``CVPATH_DISABLE_NUMBA=1`` to
force the pure-Python/numpy fallback.  Both paths perform the same floating
operations in the same order and yield bit-identical results.
"""

import itertools
import os

import numpy as np

USE_NUMBA = os.environ.get("CVPATH_DISABLE_NUMBA", "0") not in ("1", "true", "yes")


def _pair_coeffs(b1: int, a2: int) -> np.ndarray:
    """Coefficients c_k for the single-mode reordering of p^b1 q^a2."""
    kmax = min(b1, a2)
    out = np.empty(kmax + 1, dtype=np.complex128)
    out[0] = 1.0
    for k in range(1, kmax + 1):
        out[k] = out[k - 1] * ((b1 - k + 1) * (a2 - k + 1) / k) * (-2j)
    return out


def _expand_products_py(exps_a, coefs_a, exps_b, coefs_b):
    nmodes = exps_a.shape[1] // 2
    rows = []
    vals = []
    for i in range(exps_a.shape[0]):
        for j in range(exps_b.shape[0]):
            base = coefs_a[i] * coefs_b[j]
            tables = []
            for u in range(nmodes):
                tables.append(_pair_coeffs(exps_a[i, 2 * u + 1], exps_b[j, 2 * u]))
            for kvec in itertools.product(*(range(len(t)) for t in tables)):
                row = np.empty(2 * nmodes, dtype=np.int64)
                c = base
                for u, k in enumerate(kvec):
                    row[2 * u] = exps_a[i, 2 * u] + exps_b[j, 2 * u] - k
                    row[2 * u + 1] = exps_a[i, 2 * u + 1] + exps_b[j, 2 * u + 1] - k
                    c = c * tables[u][k]
                rows.append(row)
                vals.append(c)
    if not rows:
        return (np.empty((0, 2 * nmodes), dtype=np.int64),
                np.empty(0, dtype=np.complex128))
    return np.stack(rows), np.array(vals, dtype=np.complex128)


if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _expand_products_nb(exps_a, coefs_a, exps_b, coefs_b):  # pragma: no cover
        nmodes = exps_a.shape[1] // 2
        ka = exps_a.shape[0]
        kb = exps_b.shape[0]
        # pass 1: output size
        total = 0
        for i in range(ka):
            for j in range(kb):
                n = 1
                for u in range(nmodes):
                    n *= min(exps_a[i, 2 * u + 1], exps_b[j, 2 * u]) + 1
                total += n
        out_exps = np.empty((total, 2 * nmodes), dtype=np.int64)
        out_coefs = np.empty(total, dtype=np.complex128)
        tables = np.empty((nmodes, 64), dtype=np.complex128)
        kmaxs = np.empty(nmodes, dtype=np.int64)
        kvec = np.empty(nmodes, dtype=np.int64)
        row = 0
        for i in range(ka):
            for j in range(kb):
                base = coefs_a[i] * coefs_b[j]
                for u in range(nmodes):
                    b1 = exps_a[i, 2 * u + 1]
                    a2 = exps_b[j, 2 * u]
                    kmax = min(b1, a2)
                    kmaxs[u] = kmax
                    tables[u, 0] = 1.0
                    for k in range(1, kmax + 1):
                        tables[u, k] = (tables[u, k - 1]
                                        * ((b1 - k + 1) * (a2 - k + 1) / k)
                                        * (-2j))
                    kvec[u] = 0
                while True:
                    c = base
                    for u in range(nmodes):
                        k = kvec[u]
                        out_exps[row, 2 * u] = exps_a[i, 2 * u] + exps_b[j, 2 * u] - k
                        out_exps[row, 2 * u + 1] = (exps_a[i, 2 * u + 1]
                                                    + exps_b[j, 2 * u + 1] - k)
                        c = c * tables[u, k]
                    out_coefs[row] = c
                    row += 1
                    # odometer, last mode fastest (matches itertools.product)
                    u = nmodes - 1
                    while u >= 0:
                        kvec[u] += 1
                        if kvec[u] <= kmaxs[u]:
                            break
                        kvec[u] = 0
                        u -= 1
                    if u < 0:
                        break
        return out_exps, out_coefs

    expand_products = _expand_products_nb
else:
    expand_products = _expand_products_py


def aggregate_terms(exps: np.ndarray, coefs: np.ndarray):
    """Sum coefficients of duplicate exponent rows in lexicographic order.

    Returns sorted unique exponent rows and their summed coefficients with
    exact zeros dropped.  Summation order is deterministic (stable lexsort
    followed by reduceat), so results are reproducible.
    """
    if exps.shape[0] == 0:
        return exps, coefs
    order = np.lexsort(exps.T[::-1])
    exps = exps[order]
    coefs = coefs[order]
    boundary = np.empty(exps.shape[0], dtype=bool)
    boundary[0] = True
    boundary[1:] = np.any(exps[1:] != exps[:-1], axis=1)
    starts = np.flatnonzero(boundary)
    summed = np.add.reduceat(coefs, starts)
    keep = summed != 0
    return exps[starts][keep], summed[keep]
