"""Command-line interface.

Subcommands: ``simulate``, ``compare``, ``analyze``, ``translate-gkp``,
``validate``.  Exit codes form a stable contract: 0 success, 1 parse error
(or value mismatch in ``compare``), 2 unsupported circuit structure,
3 guard or oracle limit reached.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import fockoracle, pathprop
from .circuitfile import (CircuitDocument, parse_circuit_file, parse_dv_file,
                          serialize_circuit_file, translate_gkp)
from .errors import (ConvergenceError, GuardExceededError, InvalidStateError,
                     NotSymplecticError, ParseError, UnsupportedCoherenceError)
from .moments import GaussianStateSpec, expectation_poly
from .quadpoly import is_hermitian
from .symplectic import (CubicPhase, Gaussian, Rotation, SymplecticGate,
                         is_block_diagonal, normalize_circuit, rotation_gate)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_UNSUPPORTED = 2
EXIT_GUARD = 3

DEFAULT_CONFIG = {
    "naive_term_guard": 1_000_000,
    "fock_dim_guard": 2 ** 22,
    "fock_start_cutoff": 16,
    "hermitian_tol": 1e-10,
    "degree_guard": 20,
}


def _load_config(path: str | None) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if path:
        with open(path, encoding="utf-8") as fh:
            user = json.load(fh)
        unknown = set(user) - set(cfg)
        if unknown:
            raise ParseError(0, f"unknown config keys {sorted(unknown)}")
        cfg.update(user)
    return cfg


def _apply_thread_env():
    threads = os.environ.get("CVPATH_THREADS")
    if not threads:
        return
    try:
        count = max(1, int(threads))
    except ValueError:
        return
    try:
        import numba

        numba.set_num_threads(count)
    except (ImportError, ValueError):
        pass


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


# ---------------------------------------------------------------------------
# analysis / classification


def classify_element(elem, m: int, tol: float = 1e-9) -> str:
    """Resource class of one raw circuit element."""
    if isinstance(elem, CubicPhase):
        return "non-Gaussian"
    if isinstance(elem, Rotation):
        gate = rotation_gate(elem.theta, elem.mode, m)
    elif isinstance(elem, Gaussian):
        gate = elem.gate
    else:
        raise TypeError(f"unknown circuit element {elem!r}")
    if not is_block_diagonal(gate, tol):
        return "coherence-inducing"
    if np.max(np.abs(gate.S - np.eye(2 * m))) <= tol:
        return "displacement-only" if np.max(np.abs(gate.d)) > tol else "identity"
    A = gate.S[:m, :m]
    D = gate.S[m:, m:]
    off = max(np.max(np.abs(A - np.diag(np.diag(A)))),
              np.max(np.abs(D - np.diag(np.diag(D)))))
    if off > tol:
        return "entangling block-diagonal"
    return "local block-diagonal"


def analyze_document(doc: CircuitDocument) -> dict:
    """Per-gate classifications, resource totals, and simulability verdict."""
    gates = []
    for idx, (stmt, elem) in enumerate(zip(doc.statements, doc.elements),
                                       start=1):
        gates.append({"index": idx, "gate": stmt.name,
                      "class": classify_element(elem, doc.m)})
    t = sum(1 for g in gates if g["class"] == "non-Gaussian")
    c = sum(1 for g in gates if g["class"] == "coherence-inducing")
    entangling = sum(1 for g in gates
                     if g["class"] == "entangling block-diagonal")
    if c == 0:
        verdict = "efficient (Theorem 1)"
    elif c <= 2:
        verdict = "efficient for constant c (Theorem 2)"
    else:
        verdict = "outside proven regime"
    return {"m": doc.m, "gates": gates, "t": t, "c": c,
            "entangling": entangling, "verdict": verdict}


# ---------------------------------------------------------------------------
# state preparation for the Fock oracle


def state_prep_elements(state: GaussianStateSpec) -> list:
    """Gaussian unitary preparing the (pure) state spec from vacuum.

    A pure covariance factors as cov = S S^T with S = cov^{1/2} symplectic;
    mixed covariances have no unitary preparation and are rejected.
    """
    m = len(state.mean) // 2
    vacuum = GaussianStateSpec.vacuum(m)
    if (np.array_equal(state.mean, vacuum.mean)
            and np.array_equal(state.cov, vacuum.cov)):
        return []
    w, V = np.linalg.eigh(state.cov)
    root = V @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ V.T
    try:
        gate = SymplecticGate(root, state.mean)
    except NotSymplecticError:
        raise InvalidStateError(
            "Fock oracle requires a pure Gaussian input state") from None
    return [Gaussian(gate)]


# ---------------------------------------------------------------------------
# subcommands


def _simulate_report(doc: CircuitDocument, cfg: dict) -> dict:
    circuit = normalize_circuit(doc.elements, doc.m)
    if not is_hermitian(doc.observable, cfg["hermitian_tol"]):
        raise InvalidStateError("observable is not Hermitian")
    value, diag = pathprop.expectation(circuit, doc.state, doc.observable,
                                       cfg["hermitian_tol"],
                                       cfg["degree_guard"])
    d = max(1, doc.observable.degree())
    cost = pathprop.cost_estimate(circuit, d)
    return {"value": value, **diag, "cost": cost}


def _print_kv(report: dict, indent: str = ""):
    for key, val in report.items():
        if isinstance(val, dict):
            print(f"{indent}{key}:")
            _print_kv(val, indent + "  ")
        else:
            print(f"{indent}{key}: {val}")


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    doc = parse_circuit_file(_read(args.file))
    report = _simulate_report(doc, cfg)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        _print_kv(report)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _load_config(args.config)
    doc = parse_circuit_file(_read(args.file))
    circuit = normalize_circuit(doc.elements, doc.m)
    report = _simulate_report(doc, cfg)
    path_value = report["value"]
    print(f"path:  {path_value:.12g}")

    declined = []
    naive_value = None
    try:
        naive_poly = pathprop.naive_backprop(circuit, doc.observable,
                                             cfg["naive_term_guard"])
        naive_value = float(expectation_poly(doc.state, naive_poly,
                                             cfg["degree_guard"]).real)
        print(f"naive: {naive_value:.12g}   "
              f"delta {abs(naive_value - path_value):.3g}")
    except GuardExceededError as exc:
        declined.append(f"naive oracle declined: {exc}")

    fock_value = None
    try:
        prep = state_prep_elements(doc.state)
        fock_value, cutoff = fockoracle.converge(
            doc.elements, prep, doc.observable, doc.m,
            tol=args.tol * 0.1,
            start_cutoff=cfg["fock_start_cutoff"],
            dim_guard=cfg["fock_dim_guard"])
        print(f"fock:  {fock_value:.12g}   "
              f"delta {abs(fock_value - path_value):.3g}   cutoff {cutoff}")
    except (GuardExceededError, ConvergenceError) as exc:
        declined.append(f"fock oracle declined: {exc}")

    for msg in declined:
        print(msg, file=sys.stderr)
    if declined:
        return EXIT_GUARD
    ok = (abs(naive_value - path_value) <= 1e-9
          and abs(fock_value - path_value) <= args.tol)
    print("agreement: " + ("ok" if ok else "MISMATCH"))
    return EXIT_OK if ok else EXIT_PARSE


def cmd_analyze(args) -> int:
    doc = parse_circuit_file(_read(args.file))
    report = analyze_document(doc)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return EXIT_OK
    for g in report["gates"]:
        print(f"gate {g['index']}: {g['gate']} -> {g['class']}")
    print(f"t = {report['t']}  c = {report['c']}  "
          f"entangling = {report['entangling']}")
    print(f"verdict: {report['verdict']}")
    return EXIT_OK


def cmd_translate_gkp(args) -> int:
    dv = parse_dv_file(_read(args.file))
    doc = translate_gkp(dv, args.gamma_t)
    sys.stdout.write(serialize_circuit_file(doc))
    return EXIT_OK


def cmd_validate(args) -> int:
    doc = parse_circuit_file(_read(args.file))
    circuit = normalize_circuit(doc.elements, doc.m)
    if doc.observable.terms and not is_hermitian(doc.observable):
        raise InvalidStateError("observable is not Hermitian")
    print(f"ok: m={doc.m} gates={len(doc.elements)} "
          f"t={circuit.cubic_count} c={circuit.rotation_count}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvpath",
        description="Back-propagation simulator for CV circuits with "
                    "low symplectic coherence.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="expectation value via path method")
    sim.add_argument("file")
    sim.add_argument("--json", action="store_true")
    sim.add_argument("--config")
    sim.set_defaults(func=cmd_simulate)

    cmp_ = sub.add_parser("compare", help="path vs naive vs Fock oracles")
    cmp_.add_argument("file")
    cmp_.add_argument("--tol", type=float, required=True)
    cmp_.add_argument("--config")
    cmp_.set_defaults(func=cmd_compare)

    ana = sub.add_parser("analyze", help="per-gate resource classification")
    ana.add_argument("file")
    ana.add_argument("--json", action="store_true")
    ana.set_defaults(func=cmd_analyze)

    gkp = sub.add_parser("translate-gkp", help="map a {H,T,CNOT} circuit to CV")
    gkp.add_argument("file")
    gkp.add_argument("--gamma-t", type=float, required=True,
                     help="cubicity used for each logical T gate")
    gkp.set_defaults(func=cmd_translate_gkp)

    val = sub.add_parser("validate", help="parse and normalize only")
    val.add_argument("file")
    val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    _apply_thread_env()
    args = build_parser().parse_args(argv)
    if not math.isfinite(getattr(args, "tol", 1.0)) or getattr(args, "tol", 1.0) <= 0:
        print("error: --tol must be a positive finite number", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidStateError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedCoherenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (GuardExceededError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
