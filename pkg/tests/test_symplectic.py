"""Symplectic gates, Heisenberg images, and circuit normalization."""

import math

import numpy as np
import pytest

from cvpath import quadpoly as qp
from cvpath import symplectic as sp
from cvpath.errors import NotSymplecticError, UnsupportedCoherenceError


class TestConstructors:
    def test_fourier_matrix(self):
        g = sp.fourier(1, 1)
        assert np.allclose(g.S, [[0.0, 1.0], [-1.0, 0.0]])

    def test_rotation_reduces_to_identity_at_2pi(self):
        g = sp.rotation_gate(2 * math.pi, 1, 2)
        assert np.max(np.abs(g.S - np.eye(4))) < 1e-12

    def test_beamsplitter_is_orthogonal_symplectic(self):
        g = sp.beamsplitter(0.37, 1, 3, 3)
        assert np.max(np.abs(g.S @ g.S.T - np.eye(6))) < 1e-12
        assert sp.is_block_diagonal(g)

    def test_sum_gate_action(self):
        # q2 -> q2 + q1, p1 -> p1 - p2
        g = sp.sum_gate(1, 2, 2)
        img_q2 = sp.quad_transform(g, qp.q(2))
        assert img_q2.coefficient((0, 0, 1, 0)) == pytest.approx(1.0)
        assert img_q2.coefficient((1, 0, 0, 0)) == pytest.approx(1.0)
        img_p1 = sp.quad_transform(g, qp.p(1))
        assert img_p1.coefficient((0, 1, 0, 0)) == pytest.approx(1.0)
        assert img_p1.coefficient((0, 0, 0, 1)) == pytest.approx(-1.0)

    def test_squeeze_scales_quadratures(self):
        g = sp.squeeze(0.4, 1, 1)
        assert sp.quad_transform(g, qp.q(1)).coefficient((1, 0)) == \
            pytest.approx(math.exp(-0.4))
        assert sp.quad_transform(g, qp.p(1)).coefficient((0, 1)) == \
            pytest.approx(math.exp(0.4))

    def test_non_symplectic_matrix_rejected(self):
        with pytest.raises(NotSymplecticError):
            sp.SymplecticGate(np.diag([2.0, 3.0]))

    def test_non_orthogonal_passive_rejected(self):
        with pytest.raises(NotSymplecticError):
            sp.orthogonal(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestComposition:
    def rand_gate(self, rng, m):
        A = np.linalg.qr(rng.standard_normal((m, m)))[0]
        g = sp.orthogonal(A)
        r = sp.rotation_gate(rng.uniform(-2, 2), 1, m)
        d = sp.displacement(rng.uniform(-1, 1, 2 * m))
        return sp.compose(d, sp.compose(r, g))

    def test_compose_matches_sequential_transform(self):
        """compose(late, early) must equal applying early then late."""
        rng = np.random.default_rng(11)
        for _ in range(10):
            g1 = self.rand_gate(rng, 2)
            g2 = self.rand_gate(rng, 2)
            combined = sp.compose(g2, g1)
            for v in (qp.q(1), qp.p(1), qp.q(2), qp.p(2)):
                step = qp.substitute(sp.quad_transform(g2, v),
                                     sp.gate_images(g1))
                direct = sp.quad_transform(combined, v)
                assert direct.max_coeff_diff(step) < 1e-10

    def test_compose_with_identity(self):
        rng = np.random.default_rng(5)
        g = self.rand_gate(rng, 2)
        e = sp.identity(2)
        assert np.allclose(sp.compose(g, e).S, g.S)
        assert np.allclose(sp.compose(e, g).d, g.d)


class TestBlockDiagonal:
    def test_beamsplitter_lacks_coherence(self):
        assert sp.is_block_diagonal(sp.beamsplitter(0.5, 1, 2, 2))

    def test_sum_gate_lacks_coherence(self):
        assert sp.is_block_diagonal(sp.sum_gate(1, 2, 2))

    def test_fourier_exhibits_coherence(self):
        assert not sp.is_block_diagonal(sp.fourier(1, 2))


class TestNormalization:
    def test_gaussian_only_gives_single_block(self):
        ir = sp.normalize_circuit(
            [sp.Gaussian(sp.beamsplitter(0.5, 1, 2, 2)),
             sp.Gaussian(sp.sum_gate(1, 2, 2))], 2)
        assert len(ir.blocks) == 1
        assert ir.rotation_count == 0
        assert ir.cubic_count == 0

    def test_rotation_splits_blocks(self):
        ir = sp.normalize_circuit(
            [sp.CubicPhase(0.1, 1), sp.Rotation(0.7, 1),
             sp.CubicPhase(0.2, 1)], 1)
        assert ir.rotation_count == 1
        assert len(ir.blocks) == 2
        assert ir.cubic_count == 2

    def test_pi_rotation_folds_into_block(self):
        ir = sp.normalize_circuit([sp.Rotation(math.pi, 1)], 2)
        assert ir.rotation_count == 0
        assert len(ir.blocks) == 1

    def test_fourier_gaussian_detected_as_rotation(self):
        ir = sp.normalize_circuit([sp.Gaussian(sp.fourier(2, 2))], 2)
        assert ir.rotation_count == 1

    def test_coherence_mixing_gaussian_rejected(self):
        # p1 <- p1 + q2: a two-mode shear mixing position into momentum
        S = np.array([[1, 0, 0, 0],
                      [0, 1, 0, 0],
                      [0, 1, 1, 0],
                      [1, 0, 0, 1]], dtype=float)
        with pytest.raises(UnsupportedCoherenceError):
            sp.normalize_circuit([sp.Gaussian(sp.SymplecticGate(S))], 2)

    def test_offmode_cubic_swapped_to_mode_one(self):
        """Cubic gates away from mode 1 are conjugated but stay equivalent."""
        from cvpath import pathprop as pp

        elems = [sp.CubicPhase(0.2, 2), sp.Gaussian(sp.sum_gate(2, 1, 2))]
        ir = sp.normalize_circuit(elems, 2)
        H = qp.NCPolynomial.variable(2, qp.p(1))
        direct = pp.naive_backprop(ir, H)
        blocked = pp.backprop_observable(ir, H).polynomial
        assert direct.max_coeff_diff(blocked) < 1e-12

    def test_normalized_block_gaussians_stay_block_diagonal(self):
        elems = [sp.CubicPhase(0.3, 2), sp.Rotation(1.1, 2),
                 sp.Gaussian(sp.beamsplitter(0.8, 1, 2, 2))]
        ir = sp.normalize_circuit(elems, 2)
        for block in ir.blocks:
            for i in range(block.t + 1):
                assert sp.is_block_diagonal(block.prefix(i))
