"""Exact algebra of polynomials in noncommuting quadrature operators.

Variables are the quadratures q_1..q_m, p_1..p_m with [q_k, p_k] = 2i and
everything else commuting.  Monomials are stored in a fixed canonical order
interleaved by mode: q1, p1, q2, p2, ..., with q before p inside a mode, so
a monomial is just a length-2m exponent tuple.  Reordering an operator
product into canonical form only ever rewrites p q -> q p - 2i within a
single mode.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import MissingVariableError, WidthMismatchError

# numba expansion tables hold 64 commutator orders; beyond that fall back
_KERNEL_EXPONENT_LIMIT = 64


class Kind(enum.Enum):
    Q = "q"
    P = "p"


@dataclass(frozen=True)
class QuadVar:
    """A single quadrature symbol: mode index (1-based) and q/p kind."""

    mode: int
    kind: Kind

    @property
    def slot(self) -> int:
        """Position in the canonical exponent vector."""
        return 2 * (self.mode - 1) + (0 if self.kind is Kind.Q else 1)

    @staticmethod
    def from_slot(slot: int) -> "QuadVar":
        return QuadVar(slot // 2 + 1, Kind.Q if slot % 2 == 0 else Kind.P)

    def __str__(self):
        return f"{self.kind.value}{self.mode}"


def q(mode: int) -> QuadVar:
    return QuadVar(mode, Kind.Q)


def p(mode: int) -> QuadVar:
    return QuadVar(mode, Kind.P)


Monomial = tuple  # length-2m tuple of nonnegative ints


class NCPolynomial:
    """Sparse polynomial: map from canonical monomial to complex coefficient.

    Exact zeros are never stored; iteration and serialization are in sorted
    exponent order so downstream summations are reproducible.
    """

    __slots__ = ("width", "terms")

    def __init__(self, width: int, terms: Mapping[Monomial, complex] | None = None):
        self.width = width
        self.terms: dict[Monomial, complex] = {}
        if terms:
            for mono, c in terms.items():
                if len(mono) != 2 * width:
                    raise WidthMismatchError(
                        f"monomial {mono} does not have 2*{width} slots")
                if c != 0:
                    self.terms[tuple(int(e) for e in mono)] = complex(c)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, width: int) -> "NCPolynomial":
        return cls(width)

    @classmethod
    def constant(cls, width: int, value: complex) -> "NCPolynomial":
        return cls(width, {tuple([0] * (2 * width)): value})

    @classmethod
    def one(cls, width: int) -> "NCPolynomial":
        return cls.constant(width, 1.0)

    @classmethod
    def variable(cls, width: int, var: QuadVar) -> "NCPolynomial":
        if not 1 <= var.mode <= width:
            raise WidthMismatchError(f"mode {var.mode} outside width {width}")
        exps = [0] * (2 * width)
        exps[var.slot] = 1
        return cls(width, {tuple(exps): 1.0})

    @classmethod
    def monomial(cls, width: int, exps: Iterable[int], coeff: complex = 1.0):
        return cls(width, {tuple(exps): coeff})

    # -- inspection ---------------------------------------------------

    def degree(self) -> int:
        """Maximal total degree; zero polynomial has degree 0."""
        if not self.terms:
            return 0
        return max(sum(mono) for mono in self.terms)

    def term_count(self) -> int:
        return len(self.terms)

    def coefficient(self, exps: Iterable[int]) -> complex:
        return self.terms.get(tuple(exps), 0.0)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- arithmetic ---------------------------------------------------

    def _check_width(self, other: "NCPolynomial"):
        if self.width != other.width:
            raise WidthMismatchError(
                f"width mismatch: {self.width} != {other.width}")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = NCPolynomial.constant(self.width, other)
        self._check_width(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, 0.0) + c
            if s == 0:
                out.pop(mono, None)
            else:
                out[mono] = s
        return NCPolynomial(self.width, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPolynomial(self.width, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = NCPolynomial.constant(self.width, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return NCPolynomial(
                self.width, {m: c * other for m, c in self.terms.items()})
        return poly_multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.__mul__(other)
        return poly_multiply(other, self)

    def __eq__(self, other):
        return (isinstance(other, NCPolynomial) and self.width == other.width
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.width, frozenset(self.terms.items())))

    def pruned(self, tol: float = 1e-14) -> "NCPolynomial":
        """Drop coefficients with magnitude below tol."""
        return NCPolynomial(
            self.width, {m: c for m, c in self.terms.items() if abs(c) >= tol})

    def max_coeff_diff(self, other: "NCPolynomial") -> float:
        self._check_width(other)
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0))
                    for k in keys), default=0.0)

    # -- arrays (kernel interface) -------------------------------------

    def to_arrays(self):
        n = len(self.terms)
        exps = np.empty((n, 2 * self.width), dtype=np.int64)
        coefs = np.empty(n, dtype=np.complex128)
        for i, (mono, c) in enumerate(self.sorted_terms()):
            exps[i] = mono
            coefs[i] = c
        return exps, coefs

    @classmethod
    def from_arrays(cls, width, exps, coefs):
        out = cls(width)
        for row, c in zip(exps, coefs):
            if c != 0:
                out.terms[tuple(int(e) for e in row)] = complex(c)
        return out

    def __repr__(self):
        return f"NCPolynomial({self.width}, {format_poly(self)!r})"


# ---------------------------------------------------------------------------
# operations


def mono_multiply(a: Monomial, b: Monomial, width: int) -> NCPolynomial:
    """Canonical-order expansion of the operator product of two monomials."""
    pa = NCPolynomial.monomial(width, a)
    pb = NCPolynomial.monomial(width, b)
    return poly_multiply(pa, pb)


def poly_multiply(P: NCPolynomial, Q: NCPolynomial) -> NCPolynomial:
    """Operator product of two polynomials, canonicalized."""
    P._check_width(Q)
    if not P.terms or not Q.terms:
        return NCPolynomial.zero(P.width)
    ea, ca = P.to_arrays()
    eb, cb = Q.to_arrays()
    if (_kernels.USE_NUMBA
            and max(ea.max(initial=0), eb.max(initial=0)) < _KERNEL_EXPONENT_LIMIT):
        exps, coefs = _kernels.expand_products(ea, ca, eb, cb)
    else:
        exps, coefs = _kernels._expand_products_py(ea, ca, eb, cb)
    exps, coefs = _kernels.aggregate_terms(exps, coefs)
    return NCPolynomial.from_arrays(P.width, exps, coefs)


def poly_power(P: NCPolynomial, n: int) -> NCPolynomial:
    """P^n; well defined since P commutes with itself."""
    out = NCPolynomial.one(P.width)
    for _ in range(n):
        out = poly_multiply(out, P)
    return out


def substitute(P: NCPolynomial,
               images: Mapping[QuadVar, NCPolynomial]) -> NCPolynomial:
    """Replace each variable by its image, keeping the factor order.

    Every monomial becomes the ordered product of the images of its factors,
    expanded via poly_multiply.  Sound for unitary conjugation because
    U^dag (AB) U = (U^dag A U)(U^dag B U).
    """
    width = P.width
    slot_images: dict[int, NCPolynomial] = {}
    for var, img in images.items():
        if img.width != width:
            raise WidthMismatchError("substitution image width mismatch")
        slot_images[var.slot] = img
    power_cache: dict[int, list[NCPolynomial]] = {}

    def image_power(slot: int, n: int) -> NCPolynomial:
        if slot not in slot_images:
            raise MissingVariableError(
                f"no image for variable {QuadVar.from_slot(slot)}")
        powers = power_cache.setdefault(slot, [NCPolynomial.one(width)])
        while len(powers) <= n:
            powers.append(poly_multiply(powers[-1], slot_images[slot]))
        return powers[n]

    result = NCPolynomial.zero(width)
    for mono, coeff in P.sorted_terms():
        term = NCPolynomial.constant(width, coeff)
        for slot, e in enumerate(mono):
            if e:
                term = poly_multiply(term, image_power(slot, e))
        result = result + term
    return result


def identity_substitution(width: int) -> dict[QuadVar, NCPolynomial]:
    return {QuadVar.from_slot(s): NCPolynomial.variable(width, QuadVar.from_slot(s))
            for s in range(2 * width)}


def adjoint(P: NCPolynomial) -> NCPolynomial:
    """Hermitian adjoint: reverse factor order, conjugate, re-canonicalize.

    The reversal of q^a p^b per mode is p^b q^a (cross-mode factors commute),
    which is re-expanded with the same single-mode commutator rule.
    """
    width = P.width
    out = NCPolynomial.zero(width)
    for mono, coeff in P.sorted_terms():
        ppart = tuple(e if s % 2 == 1 else 0 for s, e in enumerate(mono))
        qpart = tuple(e if s % 2 == 0 else 0 for s, e in enumerate(mono))
        out = out + complex(coeff).conjugate() * mono_multiply(ppart, qpart, width)
    return out


def is_hermitian(P: NCPolynomial, tol: float = 1e-10) -> bool:
    return P.max_coeff_diff(adjoint(P)) <= tol


# ---------------------------------------------------------------------------
# text form


def _fmt_complex(c: complex) -> str:
    return f"({c.real:.17g},{c.imag:.17g})"


def format_poly(P: NCPolynomial) -> str:
    """Deterministic text form: sorted terms, 17-significant-digit coefficients."""
    if not P.terms:
        return _fmt_complex(0.0)
    parts = []
    for mono, coeff in P.sorted_terms():
        factors = [f"{QuadVar.from_slot(s)}^{e}"
                   for s, e in enumerate(mono) if e]
        parts.append(" ".join([_fmt_complex(coeff) + " *"] + factors)
                     if factors else _fmt_complex(coeff))
    return " + ".join(parts)
