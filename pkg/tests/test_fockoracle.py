"""Truncated Fock-space oracle."""

import math

import numpy as np
import pytest

from cvpath import fockoracle as fo
from cvpath import moments as mo
from cvpath import pathprop as pp
from cvpath import quadpoly as qp
from cvpath import symplectic as sp
from cvpath.errors import ConvergenceError, GuardExceededError


def number_observable(m):
    H = qp.NCPolynomial.constant(m, -0.5 * m)
    for k in range(1, m + 1):
        for v in (qp.q(k), qp.p(k)):
            H = H + 0.25 * qp.poly_power(qp.NCPolynomial.variable(m, v), 2)
    return H


class TestOperators:
    def test_commutator_on_low_levels(self):
        ops = fo.FockOperatorSet(1, 30)
        Q = ops.q(1).toarray()
        P = ops.p(1).toarray()
        comm = Q @ P - P @ Q
        # [q, p] = 2i away from the truncation edge
        assert np.max(np.abs(comm[:20, :20] - 2j * np.eye(30)[:20, :20])) < 1e-12

    def test_vacuum_is_ground_state(self):
        ops = fo.FockOperatorSet(1, 16)
        psi = ops.vacuum()
        n = float(np.real(np.vdot(psi, ops.number(1) @ psi)))
        assert n == pytest.approx(0.0)

    def test_dim_guard(self):
        with pytest.raises(GuardExceededError):
            fo.FockOperatorSet(3, 256, dim_guard=2 ** 20)


class TestGateUnitarity:
    @pytest.mark.parametrize("elem", [
        sp.CubicPhase(0.2, 1),
        sp.Rotation(0.7, 1),
        sp.Gaussian(sp.squeeze(0.3, 1, 1)),
        sp.Gaussian(sp.displacement([0.4, -0.1])),
    ])
    def test_gate_matrix_is_unitary(self, elem):
        ops = fo.FockOperatorSet(1, 24)
        U = fo.gate_matrix(elem, ops)
        assert np.max(np.abs(U.conj().T @ U - np.eye(24))) < 1e-9

    def test_norm_preserved_through_circuit(self):
        ops = fo.FockOperatorSet(2, 16)
        psi = fo.apply_elements(
            [sp.Gaussian(sp.beamsplitter(0.6, 1, 2, 2)),
             sp.CubicPhase(0.15, 1),
             sp.Rotation(0.9, 2)], ops.vacuum(), ops)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-8)


class TestGaussianAgreement:
    """Pure Gaussian circuits must match the exact Wick moments."""

    @pytest.mark.parametrize("elem,mono,want", [
        (sp.Gaussian(sp.displacement([0.5, 0.0])), (1, 0), 0.5),
        (sp.Gaussian(sp.squeeze(0.3, 1, 1)), (2, 0), math.exp(-0.6)),
        (sp.Rotation(0.8, 1), (2, 0), 1.0),
    ])
    def test_single_gate_moments(self, elem, mono, want):
        value, resid = fo.simulate([elem], [], qp.NCPolynomial.monomial(1, mono),
                                   1, 40)
        assert value == pytest.approx(want, abs=1e-8)
        assert resid < 1e-8

    def test_two_mode_gaussian_matches_wick(self):
        elems = [sp.Gaussian(sp.beamsplitter(0.35, 1, 2, 2)),
                 sp.Gaussian(sp.displacement([0.2, 0.1, -0.3, 0.4])),
                 sp.Gaussian(sp.sum_gate(1, 2, 2))]
        H = number_observable(2)
        got, cutoff = fo.converge(elems, [], H, 2, 1e-7)
        ir = sp.normalize_circuit(elems, 2)
        want, _ = pp.expectation(ir, mo.GaussianStateSpec.vacuum(2), H)
        assert got == pytest.approx(want, abs=1e-5)


class TestCubicEnvelope:
    @pytest.mark.parametrize("gamma", [-0.3, -0.1, 0.1, 0.3])
    def test_cubic_photon_number(self, gamma):
        value, cutoff = fo.converge([sp.CubicPhase(gamma, 1)], [],
                                    number_observable(1), 1, 1e-6)
        assert value == pytest.approx(27 * gamma ** 2 / 4, rel=1e-3)

    def test_converge_reports_cutoff_growth(self):
        _, small = fo.converge([sp.CubicPhase(0.05, 1)], [],
                               number_observable(1), 1, 1e-5)
        _, large = fo.converge([sp.CubicPhase(0.3, 1)], [],
                               number_observable(1), 1, 1e-5)
        assert large >= small

    def test_diverging_request_raises(self):
        with pytest.raises((ConvergenceError, GuardExceededError)):
            fo.converge([sp.CubicPhase(0.3, 1)], [], number_observable(1),
                        1, 1e-12, dim_guard=64)
