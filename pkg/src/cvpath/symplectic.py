"""Symplectic representation of Gaussian gates and the circuit IR.

A Gaussian gate G acts on the quadrature vector
Gamma = [q1..qm, p1..pm] in the Heisenberg picture as

    G^dag Gamma G = S Gamma + d,

with S real symplectic (S^T Omega S = Omega, Omega = [[0, I], [-I, 0]]).
A gate is "block-diagonal" when S never mixes positions with momenta; such
gates can entangle modes but carry no symplectic coherence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotSymplecticError, UnsupportedCoherenceError, WidthMismatchError
from .quadpoly import Kind, NCPolynomial, QuadVar

SYMPLECTIC_TOL = 1e-9


def omega_matrix(m: int) -> np.ndarray:
    omega = np.zeros((2 * m, 2 * m))
    omega[:m, m:] = np.eye(m)
    omega[m:, :m] = -np.eye(m)
    return omega


def _gamma_index(var: QuadVar, m: int) -> int:
    """Index of a quadrature in the Gamma = [q1..qm, p1..pm] ordering."""
    return var.mode - 1 if var.kind is Kind.Q else m + var.mode - 1


class SymplecticGate:
    """(S, d) pair describing a Gaussian gate's affine quadrature action."""

    __slots__ = ("S", "d", "m")

    def __init__(self, S, d=None, tol: float = SYMPLECTIC_TOL):
        S = np.asarray(S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise NotSymplecticError(f"S has invalid shape {S.shape}")
        m = S.shape[0] // 2
        d = np.zeros(2 * m) if d is None else np.asarray(d, dtype=float)
        if d.shape != (2 * m,):
            raise NotSymplecticError(f"d has invalid shape {d.shape}")
        if not (np.all(np.isfinite(S)) and np.all(np.isfinite(d))):
            raise NotSymplecticError("non-finite entries")
        omega = omega_matrix(m)
        resid = np.max(np.abs(S.T @ omega @ S - omega))
        if resid > tol:
            raise NotSymplecticError(
                f"S^T Omega S - Omega residual {resid:.3e} exceeds {tol:.0e}")
        self.S = S
        self.d = d
        self.m = m

    def __repr__(self):
        return f"SymplecticGate(m={self.m})"


def identity(m: int) -> SymplecticGate:
    return SymplecticGate(np.eye(2 * m))


def compose(g_late: SymplecticGate, g_early: SymplecticGate) -> SymplecticGate:
    """Gate applied as (late after early) on states.

    With G = G_late G_early and the Heisenberg contract above, the composed
    pair is S = S_late S_early and d = S_late d_early + d_late, so that
    quad_transform(compose(a, b), r) equals the image of r under a with each
    variable then replaced by its image under b.
    """
    if g_late.m != g_early.m:
        raise WidthMismatchError("compose: mode count mismatch")
    return SymplecticGate(g_late.S @ g_early.S,
                          g_late.S @ g_early.d + g_late.d)


def is_block_diagonal(g: SymplecticGate, tol: float = SYMPLECTIC_TOL) -> bool:
    """True iff S has no q<->p mixing; the displacement d is ignored."""
    m = g.m
    off = max(np.max(np.abs(g.S[:m, m:]), initial=0.0),
              np.max(np.abs(g.S[m:, :m]), initial=0.0))
    return off <= tol


# ---------------------------------------------------------------------------
# constructors


def _check_mode(mode: int, m: int):
    if not 1 <= mode <= m:
        raise WidthMismatchError(f"mode {mode} outside [1, {m}]")


def rotation_gate(theta: float, mode: int, m: int) -> SymplecticGate:
    """Single-mode rotation: q -> cos(t) q + sin(t) p, p -> -sin(t) q + cos(t) p."""
    _check_mode(mode, m)
    S = np.eye(2 * m)
    qi, pi = mode - 1, m + mode - 1
    c, s = math.cos(theta), math.sin(theta)
    S[qi, qi] = c
    S[qi, pi] = s
    S[pi, qi] = -s
    S[pi, pi] = c
    return SymplecticGate(S)


def fourier(mode: int, m: int) -> SymplecticGate:
    return rotation_gate(math.pi / 2, mode, m)


def beamsplitter(eta: float, mode1: int, mode2: int, m: int) -> SymplecticGate:
    """Beam splitter with efficiency eta on a pair of modes (block-diagonal)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"beam-splitter efficiency {eta} outside [0, 1]")
    _check_mode(mode1, m)
    _check_mode(mode2, m)
    if mode1 == mode2:
        raise ValueError("beam splitter needs two distinct modes")
    A = np.eye(m)
    i, j = mode1 - 1, mode2 - 1
    ce, se = math.sqrt(eta), math.sqrt(1.0 - eta)
    A[i, i] = ce
    A[i, j] = se
    A[j, i] = -se
    A[j, j] = ce
    return orthogonal(A)


def sum_gate(ctrl: int, tgt: int, m: int) -> SymplecticGate:
    """SUM gate: q_tgt += q_ctrl, p_ctrl -= p_tgt (block-diagonal, entangling)."""
    _check_mode(ctrl, m)
    _check_mode(tgt, m)
    if ctrl == tgt:
        raise ValueError("SUM gate needs two distinct modes")
    S = np.eye(2 * m)
    S[tgt - 1, ctrl - 1] = 1.0
    S[m + ctrl - 1, m + tgt - 1] = -1.0
    return SymplecticGate(S)


def displacement(d, m: int | None = None) -> SymplecticGate:
    d = np.asarray(d, dtype=float)
    if m is None:
        m = d.shape[0] // 2
    if d.shape != (2 * m,):
        raise WidthMismatchError(f"displacement vector must have 2m={2*m} entries")
    return SymplecticGate(np.eye(2 * m), d)


def orthogonal(A) -> SymplecticGate:
    """Orthogonal gate: S = A (+) A for an orthogonal matrix A."""
    A = np.asarray(A, dtype=float)
    if np.max(np.abs(A.T @ A - np.eye(A.shape[0]))) > 1e-9:
        raise NotSymplecticError("matrix is not orthogonal")
    S = np.zeros((2 * A.shape[0],) * 2)
    S[:A.shape[0], :A.shape[0]] = A
    S[A.shape[0]:, A.shape[0]:] = A
    return SymplecticGate(S)


def block_diag(A) -> SymplecticGate:
    """Block-diagonal gate S = A (+) A^{-T} for any invertible A."""
    A = np.asarray(A, dtype=float)
    try:
        Ainv_t = np.linalg.inv(A).T
    except np.linalg.LinAlgError as exc:
        raise NotSymplecticError("block-diagonal gate needs invertible A") from exc
    S = np.zeros((2 * A.shape[0],) * 2)
    S[:A.shape[0], :A.shape[0]] = A
    S[A.shape[0]:, A.shape[0]:] = Ainv_t
    return SymplecticGate(S)


def squeeze(r: float, mode: int, m: int) -> SymplecticGate:
    """Single-mode squeezer: q -> e^-r q, p -> e^r p."""
    _check_mode(mode, m)
    A = np.eye(m)
    A[mode - 1, mode - 1] = math.exp(-r)
    return block_diag(A)


def swap(mode1: int, mode2: int, m: int) -> SymplecticGate:
    A = np.eye(m)
    i, j = mode1 - 1, mode2 - 1
    A[[i, j]] = A[[j, i]]
    return orthogonal(A)


def quad_transform(g: SymplecticGate, var: QuadVar) -> NCPolynomial:
    """Heisenberg image of one quadrature: the matching row of S Gamma + d."""
    m = g.m
    row = _gamma_index(var, m)
    terms = {}
    zero = tuple([0] * (2 * m))
    if g.d[row] != 0:
        terms[zero] = g.d[row]
    for col in range(2 * m):
        coeff = g.S[row, col]
        if coeff != 0:
            cv = QuadVar(col % m + 1, Kind.Q if col < m else Kind.P)
            exps = [0] * (2 * m)
            exps[cv.slot] = 1
            terms[tuple(exps)] = coeff
    return NCPolynomial(m, terms)


def gate_images(g: SymplecticGate) -> dict[QuadVar, NCPolynomial]:
    """Images of all 2m quadratures under one gate."""
    out = {}
    for slot in range(2 * g.m):
        var = QuadVar.from_slot(slot)
        out[var] = quad_transform(g, var)
    return out


# ---------------------------------------------------------------------------
# circuit elements and IR


@dataclass(frozen=True)
class Gaussian:
    gate: SymplecticGate


@dataclass(frozen=True)
class CubicPhase:
    gamma: float
    mode: int


@dataclass(frozen=True)
class Rotation:
    theta: float
    mode: int


CircuitElement = Gaussian | CubicPhase | Rotation


@dataclass
class OGammaBlock:
    """t+1 block-diagonal gates interleaved with t cubic phase gates on mode 1.

    ``gaussians[i]`` is applied after the i-th cubic gate; prefix and suffix
    gate compositions are cached on first use by the back-propagation engine.
    """

    m: int
    gaussians: list  # t+1 SymplecticGate, application order
    cubicities: list  # t floats
    _prefix: list = field(default=None, repr=False)
    _suffix: list = field(default=None, repr=False)

    @property
    def t(self) -> int:
        return len(self.cubicities)

    @property
    def total_cubicity(self) -> float:
        return float(sum(self.cubicities))

    def prefix(self, i: int) -> SymplecticGate:
        """Composite of gaussians 0..i (gate product O_i ... O_0)."""
        if self._prefix is None:
            acc = [self.gaussians[0]]
            for g in self.gaussians[1:]:
                acc.append(compose(g, acc[-1]))
            self._prefix = acc
        return self._prefix[i]

    def suffix(self, i: int) -> SymplecticGate:
        """Composite of gaussians i..t (gate product O_t ... O_i)."""
        if self._suffix is None:
            acc = [self.gaussians[-1]]
            for g in reversed(self.gaussians[:-1]):
                acc.append(compose(acc[-1], g))
            self._suffix = acc[::-1]
        return self._suffix[i]

    def elements(self) -> list:
        """Flatten back to an element list in application order."""
        out = [Gaussian(self.gaussians[0])]
        for i, gamma in enumerate(self.cubicities):
            out.append(CubicPhase(gamma, 1))
            out.append(Gaussian(self.gaussians[i + 1]))
        return out


@dataclass
class RotationLayer:
    theta: float  # always acts on mode 1 after normalization


@dataclass
class CircuitIR:
    """Validated circuit: raw elements plus the normalized layer structure.

    ``layers`` alternates OGammaBlock and RotationLayer, starting and ending
    with a block, in application order.
    """

    m: int
    elements: list
    layers: list

    @property
    def blocks(self):
        return [l for l in self.layers if isinstance(l, OGammaBlock)]

    @property
    def rotation_count(self) -> int:
        return sum(1 for l in self.layers if isinstance(l, RotationLayer))

    @property
    def cubic_count(self) -> int:
        return sum(b.t for b in self.blocks)

    @property
    def t_max(self) -> int:
        return max((b.t for b in self.blocks), default=0)


def _as_single_mode_rotation(g: SymplecticGate,
                             tol: float = 1e-9) -> tuple[float, int] | None:
    """Return (theta, mode) if S is a pure rotation on one mode, else None."""
    m = g.m
    if np.max(np.abs(g.d)) > tol:
        return None
    diff = g.S - np.eye(2 * m)
    modes = set()
    for r, c in zip(*np.nonzero(np.abs(diff) > tol)):
        modes.add(r % m)
        modes.add(c % m)
    if len(modes) != 1:
        return None
    k = modes.pop()
    qi, pi = k, m + k
    sub = g.S[np.ix_([qi, pi], [qi, pi])]
    cth, sth = sub[0, 0], sub[0, 1]
    expect = np.array([[cth, sth], [-sth, cth]])
    if np.max(np.abs(sub - expect)) > tol or abs(cth * cth + sth * sth - 1) > tol:
        return None
    return math.atan2(sth, cth), k + 1


def normalize_circuit(elements, m: int,
                      tol: float = SYMPLECTIC_TOL) -> CircuitIR:
    """Group elements into alternating O_gamma blocks and rotation layers.

    Cubic gates on mode k != 1 are conjugated into mode 1 with SWAP gates;
    rotations on mode k != 1 likewise.  Gaussians that mix q and p beyond a
    single-mode rotation are rejected.
    """
    elements = list(elements)
    cur_gaussians = [identity(m)]
    cur_cubicities: list[float] = []
    layers: list = []

    def absorb(gate: SymplecticGate):
        cur_gaussians[-1] = compose(gate, cur_gaussians[-1])

    def close_block():
        nonlocal cur_gaussians, cur_cubicities
        layers.append(OGammaBlock(m, cur_gaussians, cur_cubicities))
        cur_gaussians = [identity(m)]
        cur_cubicities = []

    def add_rotation(theta: float, mode: int):
        if abs(math.sin(theta)) <= tol:
            # multiple of pi: S = +/- I on the mode, no coherence
            absorb(rotation_gate(theta, mode, m))
            return
        if mode != 1:
            sw = swap(1, mode, m)
            absorb(sw)
            close_block()
            layers.append(RotationLayer(theta))
            absorb(sw)
        else:
            close_block()
            layers.append(RotationLayer(theta))

    for elem in elements:
        if isinstance(elem, CubicPhase):
            if elem.mode != 1:
                sw = swap(1, elem.mode, m)
                absorb(sw)
                cur_gaussians.append(sw)
            else:
                cur_gaussians.append(identity(m))
            cur_cubicities.append(elem.gamma)
        elif isinstance(elem, Rotation):
            if not 1 <= elem.mode <= m:
                raise WidthMismatchError(f"mode {elem.mode} outside [1, {m}]")
            add_rotation(elem.theta, elem.mode)
        elif isinstance(elem, Gaussian):
            g = elem.gate
            if g.m != m:
                raise WidthMismatchError("gate width differs from circuit width")
            if is_block_diagonal(g, tol):
                absorb(g)
            else:
                rot = _as_single_mode_rotation(g)
                if rot is None:
                    raise UnsupportedCoherenceError(
                        "unsupported symplectic coherence structure: "
                        "gate mixes q and p beyond a single-mode rotation")
                add_rotation(*rot)
        else:
            raise TypeError(f"unknown circuit element {elem!r}")
    close_block()
    return CircuitIR(m, elements, layers)
