"""Line-oriented circuit file format: parser, serializer, and DV translation.

Grammar (one statement per line, ``#`` starts a comment):

    modes <m>
    gate cubic <gamma> <mode>
    gate rotation <theta> <mode>
    gate bs <eta> <i> <j>
    gate fourier <mode>
    gate sum <i> <j>
    gate orth <m*m entries, row-major>
    gate blockdiag <m*m entries, row-major>
    gate disp <2m entries>
    gate symp <(2m)*(2m) entries, row-major>
    state mean <2m entries>
    state cov <row> <2m entries>
    observable <expr>

where ``<expr>`` is a sum of terms ``coeff [*] q1^a p1^b ...`` joined by
`` + ``; coefficients are plain decimals or ``(re,im)`` pairs.  The DV
(qubit) companion format uses ``qubits <n>`` and ``gate h|t|cnot`` lines.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (CvPathError, InvalidStateError, NotSymplecticError,
                     ParseError)
from .moments import GaussianStateSpec
from .quadpoly import NCPolynomial, poly_power
from .quadpoly import p as pvar
from .quadpoly import q as qvar
from . import symplectic as sp


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# circuit documents


@dataclass
class GateStmt:
    """One ``gate`` line: keyword plus its numeric arguments, in file order."""

    name: str
    args: tuple

    def render(self) -> str:
        parts = [f"gate {self.name}"]
        for a in self.args:
            parts.append(str(a) if isinstance(a, int) else _fmt(a))
        return " ".join(parts)


@dataclass
class CircuitDocument:
    """Parsed circuit file: raw statements plus their semantic objects."""

    m: int
    statements: list[GateStmt] = field(default_factory=list)
    elements: list = field(default_factory=list)
    state: GaussianStateSpec = None
    observable: NCPolynomial = None

    def __post_init__(self):
        if self.state is None:
            self.state = GaussianStateSpec.vacuum(self.m)
        if self.observable is None:
            self.observable = NCPolynomial.zero(self.m)


@dataclass
class DVCircuit:
    """Qubit circuit over the gate set {H, T, CNOT}."""

    n: int
    gates: list = field(default_factory=list)  # (name, indices tuple)


# ---------------------------------------------------------------------------
# low-level helpers


def _floats(tokens, line, want=None):
    try:
        vals = [float(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(line, f"expected a decimal number: {exc}") from None
    if want is not None and len(vals) != want:
        raise ParseError(line, f"expected {want} numbers, got {len(vals)}")
    return vals


def _int(token, line, what):
    try:
        val = int(token)
    except ValueError:
        raise ParseError(line, f"{what} must be an integer, got {token!r}") from None
    return val


def _mode(token, line, m):
    k = _int(token, line, "mode index")
    if not 1 <= k <= m:
        raise ParseError(line, "mode index out of range")
    return k


_COEFF_PAIR = re.compile(r"^\(([^,()]+),([^,()]+)\)$")
_FACTOR = re.compile(r"^([qp])(\d+)(?:\^(\d+))?$")


def _parse_coeff(token: str, line: int) -> complex:
    pair = _COEFF_PAIR.match(token)
    if pair:
        try:
            return complex(float(pair.group(1)), float(pair.group(2)))
        except ValueError:
            raise ParseError(line, f"bad complex coefficient {token!r}") from None
    try:
        return complex(float(token))
    except ValueError:
        raise ParseError(line, f"bad coefficient {token!r}") from None


def parse_observable_expr(expr: str, m: int, line: int = 0) -> NCPolynomial:
    """Parse a sum of ``coeff [*] q1^a p1^b ...`` terms into a polynomial."""
    total = NCPolynomial.zero(m)
    for term in re.split(r"\s\+\s", expr.strip()):
        tokens = [t for t in term.split() if t != "*"]
        if not tokens:
            raise ParseError(line, "empty observable term")
        poly = NCPolynomial.constant(m, _parse_coeff(tokens[0], line))
        for tok in tokens[1:]:
            fac = _FACTOR.match(tok)
            if not fac:
                raise ParseError(line, f"bad observable factor {tok!r}")
            mode = int(fac.group(2))
            if not 1 <= mode <= m:
                raise ParseError(line, "mode index out of range")
            exp = int(fac.group(3)) if fac.group(3) else 1
            var = qvar(mode) if fac.group(1) == "q" else pvar(mode)
            poly = poly * poly_power(NCPolynomial.variable(m, var), exp)
        total = total + poly
    return total


# ---------------------------------------------------------------------------
# gate statement table: (argument spec, element builder)


def _build_gate(name, tokens, line, m):
    """Return (GateStmt, element) for one ``gate`` line, or raise ParseError."""
    try:
        if name == "cubic":
            vals = _floats(tokens[:1], line, 1)
            mode = _mode(_require(tokens, 1, line), line, m)
            _done(tokens, 2, line)
            return GateStmt(name, (vals[0], mode)), sp.CubicPhase(vals[0], mode)
        if name == "rotation":
            vals = _floats(tokens[:1], line, 1)
            mode = _mode(_require(tokens, 1, line), line, m)
            _done(tokens, 2, line)
            return GateStmt(name, (vals[0], mode)), sp.Rotation(vals[0], mode)
        if name == "bs":
            eta = _floats(tokens[:1], line, 1)[0]
            if not 0.0 <= eta <= 1.0:
                raise ParseError(line, "beamsplitter transmissivity must lie in [0, 1]")
            i = _mode(_require(tokens, 1, line), line, m)
            j = _mode(_require(tokens, 2, line), line, m)
            _done(tokens, 3, line)
            if i == j:
                raise ParseError(line, "beamsplitter modes must differ")
            return (GateStmt(name, (eta, i, j)),
                    sp.Gaussian(sp.beamsplitter(eta, i, j, m)))
        if name == "fourier":
            mode = _mode(_require(tokens, 0, line), line, m)
            _done(tokens, 1, line)
            return GateStmt(name, (mode,)), sp.Gaussian(sp.fourier(mode, m))
        if name == "sum":
            i = _mode(_require(tokens, 0, line), line, m)
            j = _mode(_require(tokens, 1, line), line, m)
            _done(tokens, 2, line)
            if i == j:
                raise ParseError(line, "sum gate modes must differ")
            return GateStmt(name, (i, j)), sp.Gaussian(sp.sum_gate(i, j, m))
        if name in ("orth", "blockdiag"):
            vals = _floats(tokens, line, m * m)
            A = np.array(vals, dtype=float).reshape(m, m)
            gate = sp.orthogonal(A) if name == "orth" else sp.block_diag(A)
            return GateStmt(name, tuple(vals)), sp.Gaussian(gate)
        if name == "disp":
            vals = _floats(tokens, line, 2 * m)
            return GateStmt(name, tuple(vals)), sp.Gaussian(sp.displacement(vals))
        if name == "symp":
            vals = _floats(tokens, line, 4 * m * m)
            S = np.array(vals, dtype=float).reshape(2 * m, 2 * m)
            return GateStmt(name, tuple(vals)), sp.Gaussian(sp.SymplecticGate(S))
    except NotSymplecticError as exc:
        raise ParseError(line, f"gate matrix is not symplectic: {exc}") from None
    except np.linalg.LinAlgError as exc:
        raise ParseError(line, f"singular gate matrix: {exc}") from None
    raise ParseError(line, f"unknown gate {name!r}")


def _require(tokens, idx, line):
    if idx >= len(tokens):
        raise ParseError(line, "missing argument")
    return tokens[idx]


def _done(tokens, count, line):
    if len(tokens) > count:
        raise ParseError(line, f"unexpected trailing arguments: {tokens[count:]}")


# ---------------------------------------------------------------------------
# parsing


def _logical_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body


def parse_circuit_file(text: str) -> CircuitDocument:
    """Parse circuit file text; raise :class:`ParseError` with line numbers."""
    m = None
    statements, elements = [], []
    mean = None
    cov_rows: dict[int, list[float]] = {}
    state_line = None
    observable = None

    for lineno, body in _logical_lines(text):
        tokens = body.split()
        key = tokens[0]
        if key == "modes":
            if m is not None:
                raise ParseError(lineno, "duplicate modes statement")
            m = _int(_require(tokens, 1, lineno), lineno, "mode count")
            _done(tokens, 2, lineno)
            if m < 1:
                raise ParseError(lineno, "mode count must be positive")
            continue
        if m is None:
            raise ParseError(lineno, "modes statement must come first")
        if key == "gate":
            stmt, elem = _build_gate(_require(tokens, 1, lineno),
                                     tokens[2:], lineno, m)
            statements.append(stmt)
            elements.append(elem)
        elif key == "state":
            sub = _require(tokens, 1, lineno)
            state_line = lineno
            if sub == "mean":
                if mean is not None:
                    raise ParseError(lineno, "duplicate state mean")
                mean = _floats(tokens[2:], lineno, 2 * m)
            elif sub == "cov":
                row = _int(_require(tokens, 2, lineno), lineno, "covariance row")
                if not 1 <= row <= 2 * m:
                    raise ParseError(lineno, "covariance row out of range")
                if row in cov_rows:
                    raise ParseError(lineno, f"duplicate covariance row {row}")
                cov_rows[row] = _floats(tokens[3:], lineno, 2 * m)
            else:
                raise ParseError(lineno, f"unknown state key {sub!r}")
        elif key == "observable":
            if observable is not None:
                raise ParseError(lineno, "duplicate observable statement")
            observable = parse_observable_expr(body[len("observable"):], m, lineno)
        else:
            raise ParseError(lineno, f"unknown statement {key!r}")

    if m is None:
        raise ParseError(1, "missing modes statement")

    if cov_rows and len(cov_rows) != 2 * m:
        missing = sorted(set(range(1, 2 * m + 1)) - set(cov_rows))
        raise ParseError(state_line, f"incomplete covariance: missing rows {missing}")

    if mean is None and not cov_rows:
        state = GaussianStateSpec.vacuum(m)
    else:
        mean_vec = np.array(mean if mean is not None else [0.0] * (2 * m))
        cov = (np.array([cov_rows[r] for r in range(1, 2 * m + 1)])
               if cov_rows else np.eye(2 * m))
        try:
            state = GaussianStateSpec(mean_vec, cov)
        except InvalidStateError as exc:
            raise ParseError(state_line, f"invalid state: {exc}") from None

    return CircuitDocument(m=m, statements=statements, elements=elements,
                           state=state,
                           observable=observable or NCPolynomial.zero(m))


# ---------------------------------------------------------------------------
# serialization


def serialize_circuit_file(doc: CircuitDocument) -> str:
    """Deterministic text form; ``parse → serialize → parse`` is idempotent."""
    from .quadpoly import format_poly

    lines = [f"modes {doc.m}"]
    lines.extend(stmt.render() for stmt in doc.statements)
    vacuum = GaussianStateSpec.vacuum(doc.m)
    if not (np.array_equal(doc.state.mean, vacuum.mean)
            and np.array_equal(doc.state.cov, vacuum.cov)):
        lines.append("state mean " + " ".join(_fmt(x) for x in doc.state.mean))
        for r in range(2 * doc.m):
            lines.append(f"state cov {r + 1} "
                         + " ".join(_fmt(x) for x in doc.state.cov[r]))
    if doc.observable.terms:
        lines.append("observable " + format_poly(doc.observable))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DV (qubit) circuits and GKP translation


def parse_dv_file(text: str) -> DVCircuit:
    """Parse a qubit circuit over {H, T, CNOT}."""
    n = None
    gates = []
    for lineno, body in _logical_lines(text):
        tokens = body.split()
        key = tokens[0]
        if key == "qubits":
            if n is not None:
                raise ParseError(lineno, "duplicate qubits statement")
            n = _int(_require(tokens, 1, lineno), lineno, "qubit count")
            _done(tokens, 2, lineno)
            if n < 1:
                raise ParseError(lineno, "qubit count must be positive")
            continue
        if n is None:
            raise ParseError(lineno, "qubits statement must come first")
        if key != "gate":
            raise ParseError(lineno, f"unknown statement {key!r}")
        name = _require(tokens, 1, lineno).lower()
        if name in ("h", "t"):
            i = _int(_require(tokens, 2, lineno), lineno, "qubit index")
            _done(tokens, 3, lineno)
            if not 1 <= i <= n:
                raise ParseError(lineno, "qubit index out of range")
            gates.append((name, (i,)))
        elif name == "cnot":
            i = _int(_require(tokens, 2, lineno), lineno, "qubit index")
            j = _int(_require(tokens, 3, lineno), lineno, "qubit index")
            _done(tokens, 4, lineno)
            if not (1 <= i <= n and 1 <= j <= n):
                raise ParseError(lineno, "qubit index out of range")
            if i == j:
                raise ParseError(lineno, "cnot control and target must differ")
            gates.append((name, (i, j)))
        else:
            raise ParseError(lineno, f"unsupported DV gate {name!r}")
    if n is None:
        raise ParseError(1, "missing qubits statement")
    return DVCircuit(n=n, gates=gates)


def total_photon_number(m: int) -> NCPolynomial:
    """n̂_total = Σ_k (q_k² + p_k²)/4 − m/2 as a quadrature polynomial."""
    H = NCPolynomial.constant(m, -0.5 * m)
    for k in range(1, m + 1):
        for var in (qvar(k), pvar(k)):
            v = NCPolynomial.variable(m, var)
            H = H + 0.25 * (v * v)
    return H


def translate_gkp(dv: DVCircuit, gamma_t: float) -> CircuitDocument:
    """Map a {H, T, CNOT} circuit to its CV counterpart on GKP encodings.

    H(i) becomes the Fourier rotation on mode i, CNOT(i, j) the SUM gate,
    and T(i) a cubic phase gate whose cubicity ``gamma_t`` the caller must
    supply.  The observable defaults to the total photon number.
    """
    m = dv.n
    statements, elements = [], []
    for name, idx in dv.gates:
        if name == "h":
            statements.append(GateStmt("rotation", (math.pi / 2, idx[0])))
            elements.append(sp.Rotation(math.pi / 2, idx[0]))
        elif name == "cnot":
            statements.append(GateStmt("sum", idx))
            elements.append(sp.Gaussian(sp.sum_gate(idx[0], idx[1], m)))
        elif name == "t":
            statements.append(GateStmt("cubic", (gamma_t, idx[0])))
            elements.append(sp.CubicPhase(gamma_t, idx[0]))
        else:  # pragma: no cover - parse_dv_file already rejects these
            raise CvPathError(f"unsupported DV gate {name!r}")
    return CircuitDocument(m=m, statements=statements, elements=elements,
                           observable=total_photon_number(m))
