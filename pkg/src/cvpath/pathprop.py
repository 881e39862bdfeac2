"""Quadrature back-propagation via path decomposition.

The Heisenberg image of a single quadrature over an O_gamma block (t+1
block-diagonal gates interleaved with t cubic phase gates on mode 1) is

    image(r) = affine part through the full gate chain
             + sum_i 3 gamma_i w_i (image of q1 through gates 0..i-1)^2,

where w_i is the p1 coefficient of r propagated through gates i..t.  Each
quadratic correction lives entirely in position variables, so the result has
degree <= 2 and subsequent cubic gates cannot amplify it.  The weighted
path-sum form (one path per cubic gate, all with the total cubicity) is kept
as a separate verification routine since it divides by the total cubicity.

Observables are back-propagated by walking the normalized layer structure
from the last applied element to the first and substituting quadrature
images; every rotation layer at most doubles the running degree.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import GuardExceededError, InvalidStateError
from .moments import GaussianStateSpec, expectation_poly
from .quadpoly import (NCPolynomial, QuadVar, is_hermitian, poly_multiply,
                       q as qvar, substitute)
from .symplectic import (CircuitIR, CubicPhase, Gaussian, OGammaBlock,
                         Rotation, RotationLayer, compose, gate_images,
                         quad_transform, rotation_gate)

NAIVE_TERM_GUARD = 10 ** 6
MIN_TOTAL_CUBICITY = 1e-12


@dataclass
class BackpropResult:
    polynomial: NCPolynomial
    path_count: int
    max_degree: int
    term_count: int
    wall_time: float


def _p1_column(block: OGammaBlock, var: QuadVar, i: int) -> float:
    """Coefficient of p1 in var propagated through gates i..t of the block."""
    from .symplectic import _gamma_index
    g = block.suffix(i)
    return float(g.S[_gamma_index(var, block.m), block.m])


def backprop_quadrature_block(block: OGammaBlock, var: QuadVar) -> NCPolynomial:
    """Exact Heisenberg image of one quadrature over an O_gamma block."""
    result = quad_transform(block.suffix(0), var)
    for i in range(1, block.t + 1):
        gamma_i = block.cubicities[i - 1]
        w = _p1_column(block, var, i)
        coeff = 3.0 * gamma_i * w
        if coeff != 0.0:
            g1 = quad_transform(block.prefix(i - 1), qvar(1))
            result = result + coeff * poly_multiply(g1, g1)
    return result


def weighted_path_backprop(block: OGammaBlock, var: QuadVar) -> NCPolynomial:
    """Weighted sum over t single-cubic-gate paths (verification form).

    Path i propagates var through gates i..t, a single cubic gate with the
    *total* cubicity, then gates 0..i-1; paths are weighted by gamma_i/gamma.
    Singular when the total cubicity vanishes, hence verification-only.
    """
    gamma = block.total_cubicity
    if block.t == 0:
        return quad_transform(block.suffix(0), var)
    if abs(gamma) < MIN_TOTAL_CUBICITY:
        raise ZeroDivisionError(
            "weighted path sum undefined for vanishing total cubicity")
    m = block.m
    result = NCPolynomial.zero(m)
    for i in range(1, block.t + 1):
        late = quad_transform(block.suffix(i), var)
        # single cubic gate with total cubicity: p1 -> p1 + 3 gamma q1^2
        shift = 3.0 * gamma * poly_multiply(
            NCPolynomial.variable(m, qvar(1)), NCPolynomial.variable(m, qvar(1)))
        images = {}
        for slot in range(2 * m):
            v = QuadVar.from_slot(slot)
            img = NCPolynomial.variable(m, v)
            if v.mode == 1 and v.slot % 2 == 1:
                img = img + shift
            images[v] = img
        mid = substitute(late, images)
        early = substitute(mid, gate_images(block.prefix(i - 1)))
        result = result + (block.cubicities[i - 1] / gamma) * early
    return result


def _block_images(block: OGammaBlock) -> dict[QuadVar, NCPolynomial]:
    return {QuadVar.from_slot(s): backprop_quadrature_block(
        block, QuadVar.from_slot(s)) for s in range(2 * block.m)}


def _rotation_images(theta: float, m: int) -> dict[QuadVar, NCPolynomial]:
    return gate_images(rotation_gate(theta, 1, m))


def backprop_observable(circuit: CircuitIR, H: NCPolynomial) -> BackpropResult:
    """Exact U^dag H U over the normalized circuit, last layer first."""
    if H.width != circuit.m:
        raise InvalidStateError("observable width differs from circuit width")
    start = time.perf_counter()
    P = H
    paths = 0
    for layer in reversed(circuit.layers):
        if isinstance(layer, OGammaBlock):
            P = substitute(P, _block_images(layer))
            paths += max(layer.t, 1)
        else:
            P = substitute(P, _rotation_images(layer.theta, circuit.m))
    return BackpropResult(P, paths, P.degree(), P.term_count(),
                          time.perf_counter() - start)


def naive_backprop(circuit: CircuitIR, H: NCPolynomial,
                   term_guard: int = NAIVE_TERM_GUARD) -> NCPolynomial:
    """Gate-by-gate substitution over the raw element list (oracle path).

    Works directly on the un-normalized elements, so it also cross-checks
    circuit normalization.  Exponential in the worst case; guarded.
    """
    if H.width != circuit.m:
        raise InvalidStateError("observable width differs from circuit width")
    m = circuit.m
    P = H
    for elem in reversed(circuit.elements):
        if isinstance(elem, Gaussian):
            images = gate_images(elem.gate)
        elif isinstance(elem, Rotation):
            images = gate_images(rotation_gate(elem.theta, elem.mode, m))
        elif isinstance(elem, CubicPhase):
            images = {}
            shift = 3.0 * elem.gamma * poly_multiply(
                NCPolynomial.variable(m, qvar(elem.mode)),
                NCPolynomial.variable(m, qvar(elem.mode)))
            for slot in range(2 * m):
                v = QuadVar.from_slot(slot)
                img = NCPolynomial.variable(m, v)
                if v.mode == elem.mode and slot % 2 == 1:
                    img = img + shift
                images[v] = img
        else:
            raise TypeError(f"unknown circuit element {elem!r}")
        P = substitute(P, images)
        if P.term_count() > term_guard:
            raise GuardExceededError(
                f"naive back-propagation exceeded {term_guard} terms")
    return P


def expectation(circuit: CircuitIR, state: GaussianStateSpec,
                H: NCPolynomial, hermitian_tol: float = 1e-10,
                degree_guard: int = 20):
    """Expectation of H at the circuit output; returns (value, diagnostics)."""
    if not is_hermitian(H, hermitian_tol):
        raise InvalidStateError("observable is not Hermitian")
    result = backprop_observable(circuit, H)
    raw = expectation_poly(state, result.polynomial, degree_guard)
    return float(raw.real), {
        "imag_residual": abs(raw.imag),
        "path_count": result.path_count,
        "max_degree": result.max_degree,
        "term_count": result.term_count,
        "wall_time": result.wall_time,
    }


def cost_estimate(circuit: CircuitIR, d: int) -> dict:
    """Instantiate the asymptotic cost formulas for a normalized circuit."""
    m = circuit.m
    c = circuit.rotation_count
    t = circuit.t_max
    degree_bound = d * 2 ** (c + 1)
    if c == 0:
        formula = "O(m^{3d} + t^2 m^6)"
        ops_order = float(m) ** (3 * d) + float(t) ** 2 * float(m) ** 6
    else:
        formula = "O(m^{d 2^{c+1}} + (c+1) t^2 m^7)"
        ops_order = (float(m) ** degree_bound
                     + (c + 1) * float(t) ** 2 * float(m) ** 7)
    return {
        "m": m,
        "t_max": t,
        "cubic_count": circuit.cubic_count,
        "c": c,
        "d": d,
        "degree_bound": degree_bound,
        "term_count_order": f"m^{degree_bound}",
        "formula": formula,
        "ops_order": ops_order,
        "efficient_regime": c <= 2,
    }
