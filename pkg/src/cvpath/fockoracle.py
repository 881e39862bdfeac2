"""Brute-force truncated Fock-space simulator (ground truth at desk scale).

Each mode is truncated to its lowest N number states; q = a + a^dag and
p = -i(a - a^dag) hold exactly at the matrix level (hbar = 2 convention).
Every gate is the exponential of i times a Hermitian generator built from
the truncated operators, so gates are unitary to solver precision and
truncation shows up as energy leakage that the cutoff-doubling convergence
loop detects.

Gaussian gates are synthesized from their symplectic matrix via a polar
decomposition S = W P: W is orthogonal symplectic, realized as a passive
mode-space unitary, and P is the exponential of a quadratic generator read
off from its real matrix logarithm.  Displacements are applied as a separate
exact exponential.  The cubic phase gate is defined by its quadrature action
p -> p + 3 gamma q^2, which under [q, p] = 2i is generated by gamma q^3 / 2.

State evolution uses sparse generators with Krylov ``expm_multiply`` so that
two-mode cutoffs up to the dimension guard stay affordable; dense unitary
matrices are only materialized on request (``gate_matrix``).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.linalg import expm_multiply

from .errors import ConvergenceError, GuardExceededError
from .quadpoly import NCPolynomial, QuadVar
from .symplectic import (CubicPhase, Gaussian, Rotation, SymplecticGate,
                         omega_matrix, rotation_gate)

DEFAULT_DIM_GUARD = 2 ** 22  # max N^m for the state vector
DENSE_DIM_GUARD = 1200  # max dimension for dense unitary synthesis


def _expm_i_hermitian(h: np.ndarray) -> np.ndarray:
    """exp(i h) for Hermitian h via eigendecomposition (exactly unitary)."""
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


class FockOperatorSet:
    """Truncated mode operators and their sparse multi-mode embeddings."""

    def __init__(self, m: int, cutoff: int,
                 dim_guard: int = DEFAULT_DIM_GUARD):
        if cutoff ** m > dim_guard:
            raise GuardExceededError(
                f"Fock dimension {cutoff}^{m} exceeds guard {dim_guard}")
        self.m = m
        self.cutoff = cutoff
        self.dim = cutoff ** m
        n = np.arange(1, cutoff)
        self.a1 = np.diag(np.sqrt(n), k=1).astype(complex)
        self.q1 = self.a1 + self.a1.conj().T
        self.p1 = -1j * (self.a1 - self.a1.conj().T)
        self._embed_cache: dict[tuple, scipy.sparse.csr_matrix] = {}

    def embed(self, op, mode: int) -> scipy.sparse.csr_matrix:
        """Tensor-product placement of a single-mode operator (mode 1-based)."""
        out = scipy.sparse.identity(1, dtype=complex, format="csr")
        eye = scipy.sparse.identity(self.cutoff, dtype=complex, format="csr")
        op = scipy.sparse.csr_matrix(op)
        for k in range(1, self.m + 1):
            out = scipy.sparse.kron(out, op if k == mode else eye, format="csr")
        return out

    def _cached(self, name: str, mode: int, single: np.ndarray):
        key = (name, mode)
        if key not in self._embed_cache:
            self._embed_cache[key] = self.embed(single, mode)
        return self._embed_cache[key]

    def a(self, mode: int):
        return self._cached("a", mode, self.a1)

    def q(self, mode: int):
        return self._cached("q", mode, self.q1)

    def p(self, mode: int):
        return self._cached("p", mode, self.p1)

    def number(self, mode: int):
        return self._cached("n", mode, self.a1.conj().T @ self.a1)

    def vacuum(self) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[0] = 1.0
        return psi

    def quadrature_matrix(self, var: QuadVar):
        return self.q(var.mode) if var.slot % 2 == 0 else self.p(var.mode)


def poly_matrix(P: NCPolynomial, ops: FockOperatorSet) -> np.ndarray:
    """Dense matrix image of a polynomial, factors in canonical order."""
    out = np.zeros((ops.dim, ops.dim), dtype=complex)
    for mono, coeff in P.sorted_terms():
        term = np.eye(ops.dim, dtype=complex)
        for slot, e in enumerate(mono):
            if e:
                mat = ops.quadrature_matrix(QuadVar.from_slot(slot)).toarray()
                term = term @ np.linalg.matrix_power(mat, e)
        out += coeff * term
    return out


def poly_apply(P: NCPolynomial, ops: FockOperatorSet,
               psi: np.ndarray) -> np.ndarray:
    """P |psi> via sparse mat-vec chains (rightmost factor first)."""
    out = np.zeros_like(psi)
    for mono, coeff in P.sorted_terms():
        phi = psi
        for slot in range(2 * ops.m - 1, -1, -1):
            e = mono[slot]
            if e:
                mat = ops.quadrature_matrix(QuadVar.from_slot(slot))
                for _ in range(e):
                    phi = mat @ phi
        out = out + coeff * phi
    return out


def expectation_value(P: NCPolynomial, ops: FockOperatorSet,
                      psi: np.ndarray) -> complex:
    return complex(psi.conj() @ poly_apply(P, ops, psi))


# ---------------------------------------------------------------------------
# gate synthesis


def _passive_generator(u: np.ndarray, ops: FockOperatorSet):
    """Hermitian G with exp(iG)^dag a_j exp(iG) = sum_k u_jk a_k."""
    h = -1j * scipy.linalg.logm(u)  # Hermitian since u is unitary
    gen = scipy.sparse.csr_matrix((ops.dim, ops.dim), dtype=complex)
    for j in range(ops.m):
        adag_j = ops.a(j + 1).conj().T.tocsr()
        for k in range(ops.m):
            if abs(h[j, k]) > 0:
                gen = gen + h[j, k] * (adag_j @ ops.a(k + 1))
    return gen


def _quadratic_generator(hq: np.ndarray, ops: FockOperatorSet):
    """Hermitian generator (1/4) Gamma^T hq Gamma giving S = e^{-Omega hq}."""
    m = ops.m
    gammas = [ops.q(k + 1) for k in range(m)] + [ops.p(k + 1) for k in range(m)]
    gen = scipy.sparse.csr_matrix((ops.dim, ops.dim), dtype=complex)
    for j in range(2 * m):
        for k in range(2 * m):
            if hq[j, k] != 0:
                gen = gen + (0.25 * hq[j, k]) * (gammas[j] @ gammas[k])
    return gen


def _displacement_generator(d: np.ndarray, ops: FockOperatorSet):
    m = ops.m
    gen = scipy.sparse.csr_matrix((ops.dim, ops.dim), dtype=complex)
    for k in range(m):
        alpha = 0.5 * (d[k] + 1j * d[m + k])
        if alpha != 0:
            # alpha a^dag - alpha^* a = i * Hermitian
            gen = gen + (-1j) * (alpha * ops.a(k + 1).conj().T.tocsr()
                                 - np.conj(alpha) * ops.a(k + 1))
    return gen


def element_generators(elem, ops: FockOperatorSet) -> list:
    """Hermitian generators whose i-exponentials realize the element.

    Returned in application order: the element's unitary is the product of
    exp(i G) factors applied left to right on the state.
    """
    if isinstance(elem, CubicPhase):
        Q = ops.q(elem.mode)
        return [(0.5 * elem.gamma) * (Q @ Q @ Q)]
    if isinstance(elem, Rotation):
        elem = Gaussian(rotation_gate(elem.theta, elem.mode, ops.m))
    if not isinstance(elem, Gaussian):
        raise TypeError(f"unknown circuit element {elem!r}")
    gate = elem.gate
    m = gate.m
    gens = []
    W, P = scipy.linalg.polar(gate.S)
    if np.max(np.abs(P - np.eye(2 * m))) > 1e-12:
        # S = e^{-Omega hq} for the quadratic generator, so hq = Omega log(P)
        L = scipy.linalg.logm(P).real
        hq = omega_matrix(m) @ L
        hq = 0.5 * (hq + hq.T)  # symmetric up to round-off by construction
        gens.append(_quadratic_generator(hq, ops))
    if np.max(np.abs(W - np.eye(2 * m))) > 1e-12:
        u = W[:m, :m] - 1j * W[:m, m:]
        gens.append(_passive_generator(u, ops))
    if np.max(np.abs(gate.d)) > 0:
        gens.append(_displacement_generator(gate.d, ops))
    return gens


def gate_matrix(elem, ops: FockOperatorSet) -> np.ndarray:
    """Dense unitary for one circuit element (small dimensions only)."""
    if ops.dim > DENSE_DIM_GUARD:
        raise GuardExceededError(
            f"dense gate synthesis at dimension {ops.dim} exceeds "
            f"{DENSE_DIM_GUARD}")
    U = np.eye(ops.dim, dtype=complex)
    for gen in element_generators(elem, ops):
        U = _expm_i_hermitian(gen.toarray()) @ U
    return U


def apply_elements(elements, psi: np.ndarray, ops: FockOperatorSet,
                   norm_tol: float = 1e-8) -> np.ndarray:
    for elem in elements:
        for gen in element_generators(elem, ops):
            psi = expm_multiply(1j * gen.tocsc(), psi)
        drift = abs(np.linalg.norm(psi) - 1.0)
        if drift > norm_tol:
            raise GuardExceededError(
                f"unitarity drift {drift:.3e} after {elem!r}; cutoff too small")
    return psi


def simulate(elements, prep, H: NCPolynomial, m: int, cutoff: int,
             dim_guard: int = DEFAULT_DIM_GUARD):
    """Apply prep then circuit elements to vacuum; return (<H>, imag residual)."""
    ops = FockOperatorSet(m, cutoff, dim_guard)
    psi = ops.vacuum()
    psi = apply_elements(list(prep) + list(elements), psi, ops)
    val = expectation_value(H, ops, psi)
    return float(val.real), abs(float(val.imag))


def converge(elements, prep, H: NCPolynomial, m: int, tol: float,
             start_cutoff: int = 16,
             dim_guard: int = DEFAULT_DIM_GUARD):
    """Double the cutoff until two successive values differ by < tol."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    cutoff = start_cutoff
    prev = None
    while cutoff ** m <= dim_guard:
        try:
            value, _ = simulate(elements, prep, H, m, cutoff, dim_guard)
        except GuardExceededError:
            break
        if prev is not None and abs(value - prev) < tol:
            return value, cutoff
        prev = value
        cutoff *= 2
    raise ConvergenceError(
        f"Fock oracle did not converge to {tol} within the dimension guard")
