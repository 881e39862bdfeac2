"""Ordered moments of Gaussian states."""

import math

import numpy as np
import pytest

from cvpath import moments as mo
from cvpath import quadpoly as qp
from cvpath import symplectic as sp
from cvpath.errors import GuardExceededError, InvalidStateError


class TestStateSpec:
    def test_vacuum_two_point(self):
        M = mo.two_point(mo.GaussianStateSpec.vacuum(1))
        assert np.allclose(M, [[1.0, 1j], [-1j, 1.0]])

    def test_asymmetric_cov_rejected(self):
        with pytest.raises(InvalidStateError):
            mo.GaussianStateSpec([0, 0], [[1.0, 0.5], [0.0, 1.0]])

    def test_uncertainty_violating_cov_rejected(self):
        with pytest.raises(InvalidStateError):
            mo.GaussianStateSpec([0, 0], 0.1 * np.eye(2))

    def test_evolved_by_displacement(self):
        st = mo.GaussianStateSpec.vacuum(1).evolved(
            sp.displacement([0.3, -0.7]))
        assert np.allclose(st.mean, [0.3, -0.7])
        assert np.allclose(st.cov, np.eye(2))


class TestVacuumMoments:
    def test_odd_moments_vanish(self):
        st = mo.GaussianStateSpec.vacuum(1)
        assert mo.moment(st, (1, 0)) == pytest.approx(0.0)
        assert mo.moment(st, (3, 0)) == pytest.approx(0.0)
        assert mo.moment(st, (1, 2)) == pytest.approx(0.0)

    def test_q4_is_three(self):
        # <q^4> = 3 <q^2>^2 for a centered Gaussian with <q^2> = 1
        st = mo.GaussianStateSpec.vacuum(1)
        assert mo.moment(st, (4, 0)) == pytest.approx(3.0)

    def test_ordered_qp_moment_is_i(self):
        # <q p> = cov_qp + i Omega_qp = i on vacuum
        st = mo.GaussianStateSpec.vacuum(1)
        assert mo.moment(st, (1, 1)) == pytest.approx(1j)

    def test_q6_is_fifteen(self):
        st = mo.GaussianStateSpec.vacuum(1)
        assert mo.moment(st, (6, 0)) == pytest.approx(15.0)


class TestWickConsistency:
    def test_pair_factorization_random_cov(self):
        """Fourth ordered moment from the recursion equals the Wick sum."""
        rng = np.random.default_rng(2)
        S = sp.compose(sp.rotation_gate(0.9, 1, 1),
                       sp.squeeze(0.4, 1, 1))
        st = mo.GaussianStateSpec.vacuum(1).evolved(S)
        M = mo.two_point(st)
        # <q q p p> = M00 M11 + M01 M01 + M01 M01 with slot->index map q,p
        got = mo.moment(st, (2, 2))
        want = M[0, 0] * M[1, 1] + 2 * M[0, 1] ** 2
        assert got == pytest.approx(want)

    def test_mean_shift_expansion(self):
        st = mo.GaussianStateSpec([0.5, 0.0], np.eye(2))
        # <q^2> = var + mean^2
        assert mo.moment(st, (2, 0)) == pytest.approx(1.25)
        assert mo.moment(st, (1, 0)) == pytest.approx(0.5)

    def test_degree_guard(self):
        st = mo.GaussianStateSpec.vacuum(1)
        with pytest.raises(GuardExceededError):
            mo.moment(st, (30, 0), degree_guard=20)


class TestAgainstFock:
    def test_moments_match_fock_vacuum_and_squeezed(self):
        from cvpath import fockoracle as fo

        ops = fo.FockOperatorSet(1, 60)
        vac = ops.vacuum()
        states = {
            "vacuum": (mo.GaussianStateSpec.vacuum(1), []),
            "squeezed": (mo.GaussianStateSpec.vacuum(1).evolved(
                sp.squeeze(0.4, 1, 1)),
                [sp.Gaussian(sp.squeeze(0.4, 1, 1))]),
            "displaced": (mo.GaussianStateSpec.vacuum(1).evolved(
                sp.displacement([0.6, -0.2])),
                [sp.Gaussian(sp.displacement([0.6, -0.2]))]),
        }
        for name, (spec, prep) in states.items():
            psi = fo.apply_elements(prep, vac, ops)
            for mono in [(2, 0), (0, 2), (1, 1), (2, 2), (4, 0), (3, 1)]:
                P = qp.NCPolynomial.monomial(1, mono)
                want = fo.expectation_value(P, ops, psi)
                got = mo.moment(spec, mono)
                assert got == pytest.approx(want, abs=1e-8), (name, mono)

    def test_expectation_poly_linear(self):
        st = mo.GaussianStateSpec([0.3, 0.1], np.eye(2))
        P = (2.0 * qp.NCPolynomial.variable(1, qp.q(1))
             + qp.NCPolynomial.constant(1, 1.0))
        assert mo.expectation_poly(st, P) == pytest.approx(1.6)
