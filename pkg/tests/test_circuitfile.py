"""Circuit file grammar, serialization round-trips, and DV translation."""

import math

import numpy as np
import pytest

from cvpath import circuitfile as cf
from cvpath import quadpoly as qp
from cvpath import symplectic as sp
from cvpath.errors import ParseError

CUBIC_FILE = """\
modes 1
gate cubic 0.1 1
observable 0.25 q1^2 + 0.25 p1^2 + -0.5
"""


class TestParsing:
    def test_cubic_example(self):
        doc = cf.parse_circuit_file(CUBIC_FILE)
        assert doc.m == 1
        assert isinstance(doc.elements[0], sp.CubicPhase)
        assert doc.elements[0].gamma == pytest.approx(0.1)
        assert doc.observable.coefficient((2, 0)) == pytest.approx(0.25)
        assert doc.observable.coefficient((0, 0)) == pytest.approx(-0.5)

    def test_comments_and_blank_lines_ignored(self):
        doc = cf.parse_circuit_file(
            "# header\nmodes 2\n\ngate sum 1 2  # entangler\n")
        assert len(doc.elements) == 1

    def test_all_gate_kinds(self):
        text = """modes 2
gate cubic 0.1 2
gate rotation 0.5 1
gate bs 0.7 1 2
gate fourier 2
gate sum 2 1
gate orth 0.6 0.8 -0.8 0.6
gate blockdiag 2 0 0 0.5
gate disp 0.1 0.2 0.3 0.4
"""
        doc = cf.parse_circuit_file(text)
        assert len(doc.elements) == 8
        # every Gaussian parsed here is a valid symplectic gate
        for elem in doc.elements:
            if isinstance(elem, sp.Gaussian):
                assert elem.gate.m == 2

    def test_state_block(self):
        text = """modes 1
state mean 0.5 -0.25
state cov 1 1 0
state cov 2 0 1
observable 1 q1
"""
        doc = cf.parse_circuit_file(text)
        assert np.allclose(doc.state.mean, [0.5, -0.25])
        assert np.allclose(doc.state.cov, np.eye(2))

    def test_mode_index_out_of_range(self):
        with pytest.raises(ParseError) as err:
            cf.parse_circuit_file("modes 2\ngate fourier 3\n")
        assert err.value.line == 2
        assert "out of range" in err.value.message

    def test_unknown_statement(self):
        with pytest.raises(ParseError) as err:
            cf.parse_circuit_file("modes 1\nwobble 3\n")
        assert err.value.line == 2

    def test_non_orthogonal_orth_rejected(self):
        with pytest.raises(ParseError) as err:
            cf.parse_circuit_file("modes 2\ngate orth 1 1 0 1\n")
        assert "symplectic" in err.value.message

    def test_missing_modes(self):
        with pytest.raises(ParseError):
            cf.parse_circuit_file("gate fourier 1\n")

    def test_incomplete_covariance(self):
        with pytest.raises(ParseError) as err:
            cf.parse_circuit_file("modes 1\nstate cov 1 1 0\n")
        assert "missing rows" in err.value.message

    def test_invalid_covariance_rejected(self):
        text = "modes 1\nstate cov 1 0.1 0\nstate cov 2 0 0.1\n"
        with pytest.raises(ParseError) as err:
            cf.parse_circuit_file(text)
        assert "invalid state" in err.value.message

    def test_bad_number_reports_line(self):
        with pytest.raises(ParseError) as err:
            cf.parse_circuit_file("modes 1\ngate cubic zero 1\n")
        assert err.value.line == 2


class TestObservableExpr:
    def test_complex_coefficients(self):
        P = cf.parse_observable_expr("(0,1) q1^1 p1^1 + (0,-1) p1^1 q1^1", 1)
        # i q p - i p q = i [q, p] = -2
        assert P.coefficient((0, 0)) == pytest.approx(-2.0)
        assert P.coefficient((1, 1)) == pytest.approx(0.0)

    def test_implicit_exponent(self):
        P = cf.parse_observable_expr("2 q1", 1)
        assert P.coefficient((1, 0)) == pytest.approx(2.0)

    def test_bad_factor(self):
        with pytest.raises(ParseError):
            cf.parse_observable_expr("1 x1^2", 1, line=7)


class TestRoundTrip:
    CASES = [
        CUBIC_FILE,
        "modes 2\ngate bs 0.12345678901234567 1 2\ngate disp 1 2 3 4\n",
        ("modes 1\nstate mean 0.5 0\nstate cov 1 "
         + f"{math.exp(0.8):.17g} 0\nstate cov 2 0 {math.exp(-0.8):.17g}\n"
         "observable (1,0) * q1^2\n"),
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_parse_serialize_parse_idempotent(self, text):
        doc1 = cf.parse_circuit_file(text)
        out1 = cf.serialize_circuit_file(doc1)
        doc2 = cf.parse_circuit_file(out1)
        out2 = cf.serialize_circuit_file(doc2)
        assert out1 == out2
        assert doc1.m == doc2.m
        assert np.array_equal(doc1.state.mean, doc2.state.mean)
        assert np.array_equal(doc1.state.cov, doc2.state.cov)
        assert doc1.observable.max_coeff_diff(doc2.observable) == 0.0
        for e1, e2 in zip(doc1.statements, doc2.statements):
            assert e1 == e2


class TestDVTranslation:
    def test_parse_dv(self):
        dv = cf.parse_dv_file("qubits 2\ngate h 1\ngate cnot 1 2\ngate t 2\n")
        assert dv.n == 2
        assert dv.gates == [("h", (1,)), ("cnot", (1, 2)), ("t", (2,))]

    def test_unsupported_gate(self):
        with pytest.raises(ParseError):
            cf.parse_dv_file("qubits 1\ngate s 1\n")

    def test_translate_h(self):
        doc = cf.translate_gkp(cf.DVCircuit(1, [("h", (1,))]), gamma_t=0.1)
        assert isinstance(doc.elements[0], sp.Rotation)
        assert doc.elements[0].theta == pytest.approx(math.pi / 2)

    def test_translate_t_uses_gamma_flag(self):
        doc = cf.translate_gkp(cf.DVCircuit(1, [("t", (1,))]), gamma_t=0.07)
        assert isinstance(doc.elements[0], sp.CubicPhase)
        assert doc.elements[0].gamma == pytest.approx(0.07)

    def test_translate_cnot(self):
        doc = cf.translate_gkp(cf.DVCircuit(2, [("cnot", (1, 2))]), gamma_t=0.1)
        assert isinstance(doc.elements[0], sp.Gaussian)

    def test_empty_circuit(self):
        doc = cf.translate_gkp(cf.DVCircuit(2, []), gamma_t=0.1)
        assert doc.elements == []
        assert doc.m == 2

    def test_output_parses_and_normalizes(self):
        dv = cf.parse_dv_file(
            "qubits 2\ngate h 1\ngate t 1\ngate cnot 1 2\ngate t 2\ngate h 1\n")
        doc = cf.translate_gkp(dv, gamma_t=0.1)
        text = cf.serialize_circuit_file(doc)
        doc2 = cf.parse_circuit_file(text)
        ir = sp.normalize_circuit(doc2.elements, doc2.m)
        assert ir.cubic_count == 2
        assert ir.rotation_count == 2
