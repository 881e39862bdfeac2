"""Ordered quadrature moments of Gaussian states.

A Gaussian state is specified by its mean vector <Gamma> and symmetrized
covariance matrix (vacuum = identity under hbar = 2).  Ordered moments are
evaluated by a Wick expansion with the non-symmetric two-point function
M = cov + i Omega, whose (j, k) entry is <dGamma_j dGamma_k> with operator j
applied first in the product.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import GuardExceededError, InvalidStateError
from .quadpoly import NCPolynomial, QuadVar
from .symplectic import SymplecticGate, omega_matrix

DEFAULT_DEGREE_GUARD = 20


class GaussianStateSpec:
    """Mean + covariance description of an m-mode Gaussian input state."""

    def __init__(self, mean, cov, tol: float = 1e-10):
        mean = np.asarray(mean, dtype=float)
        cov = np.asarray(cov, dtype=float)
        if mean.ndim != 1 or mean.shape[0] % 2:
            raise InvalidStateError(f"mean has invalid shape {mean.shape}")
        m = mean.shape[0] // 2
        if cov.shape != (2 * m, 2 * m):
            raise InvalidStateError(f"cov has invalid shape {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > tol:
            raise InvalidStateError("covariance matrix is not symmetric")
        omega = omega_matrix(m)
        eigs = np.linalg.eigvalsh(cov + 1j * omega)
        if eigs.min() < -1e-9:
            raise InvalidStateError(
                f"cov + i Omega has eigenvalue {eigs.min():.3e} < 0: "
                "state violates the uncertainty relation")
        self.mean = mean
        self.cov = cov
        self.m = m
        self._M = None
        self._centered_cache: dict[tuple, complex] = {}

    @classmethod
    def vacuum(cls, m: int) -> "GaussianStateSpec":
        return cls(np.zeros(2 * m), np.eye(2 * m))

    def evolved(self, gate: SymplecticGate) -> "GaussianStateSpec":
        """State after applying a Gaussian gate: mean -> S mean + d, cov -> S cov S^T."""
        if gate.m != self.m:
            raise InvalidStateError("gate width differs from state width")
        return GaussianStateSpec(gate.S @ self.mean + gate.d,
                                 gate.S @ self.cov @ gate.S.T)


def two_point(state: GaussianStateSpec) -> np.ndarray:
    """Ordered two-point function M = cov + i Omega."""
    if state._M is None:
        state._M = state.cov + 1j * omega_matrix(state.m)
    return state._M


def _slot_gamma_index(slot: int, m: int) -> int:
    mode, is_p = slot // 2, slot % 2
    return mode + (m if is_p else 0)


def _centered_moment(state: GaussianStateSpec, counts: tuple) -> complex:
    """Wick sum over ordered perfect pairings of a centered power product.

    ``counts[slot]`` is the multiplicity of each quadrature in the ordered
    factor sequence (canonical slot order).  Pairing the first remaining
    factor with each later partner gives a recursion on the count vector,
    memoized per state; all positions of equal slots are interchangeable, so
    the state space is polynomial.
    """
    n = sum(counts)
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    cache = state._centered_cache
    hit = cache.get(counts)
    if hit is not None:
        return hit
    M = two_point(state)
    m = state.m
    v = next(s for s, c in enumerate(counts) if c)
    rest = list(counts)
    rest[v] -= 1
    total = 0.0 + 0.0j
    gv = _slot_gamma_index(v, m)
    for u in range(v, len(counts)):
        ways = rest[u]
        if ways == 0:
            continue
        rest[u] -= 1
        total += ways * M[gv, _slot_gamma_index(u, m)] \
            * _centered_moment(state, tuple(rest))
        rest[u] += 1
    cache[counts] = total
    return total


def moment(state: GaussianStateSpec, mono: tuple,
           degree_guard: int = DEFAULT_DEGREE_GUARD) -> complex:
    """Expectation of the ordered product of a canonical monomial's factors."""
    n = sum(mono)
    if n > degree_guard:
        raise GuardExceededError(
            f"monomial degree {n} exceeds moment guard {degree_guard}")
    m = state.m
    mu = [state.mean[_slot_gamma_index(s, m)] for s in range(2 * m)]
    if all(x == 0.0 for x in mu):
        return _centered_moment(state, tuple(mono))
    # binomially expand each factor about its mean
    total = 0.0 + 0.0j
    for jvec in itertools.product(*(range(c + 1) for c in mono)):
        w = 1.0
        for slot, (c, j) in enumerate(zip(mono, jvec)):
            if c:
                w *= math.comb(c, j) * mu[slot] ** (c - j)
        total += w * _centered_moment(state, jvec)
    return total


def expectation_poly(state: GaussianStateSpec, P: NCPolynomial,
                     degree_guard: int = DEFAULT_DEGREE_GUARD) -> complex:
    """Linear combination of ordered monomial moments, in sorted term order."""
    if P.width != state.m:
        raise InvalidStateError("polynomial width differs from state width")
    total = 0.0 + 0.0j
    for mono, coeff in P.sorted_terms():
        total += coeff * moment(state, mono, degree_guard)
    return total


def mean_of(state: GaussianStateSpec, var: QuadVar) -> float:
    return float(state.mean[_slot_gamma_index(var.slot, state.m)])
