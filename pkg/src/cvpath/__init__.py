"""Classical simulation of continuous-variable circuits via quadrature
back-propagation, with Fock-space and gate-by-gate verification oracles."""

from .errors import (ConvergenceError, CvPathError, GuardExceededError,
                     InvalidStateError, MissingVariableError,
                     NotSymplecticError, ParseError,
                     UnsupportedCoherenceError, WidthMismatchError)
from .moments import GaussianStateSpec, expectation_poly, moment, two_point
from .pathprop import (BackpropResult, backprop_observable,
                       backprop_quadrature_block, cost_estimate, expectation,
                       naive_backprop, weighted_path_backprop)
from .quadpoly import (NCPolynomial, QuadVar, adjoint, format_poly,
                       is_hermitian, p, poly_multiply, poly_power, q,
                       substitute)
from .symplectic import (CircuitIR, CubicPhase, Gaussian, OGammaBlock,
                         Rotation, RotationLayer, SymplecticGate,
                         beamsplitter, block_diag, compose, displacement,
                         fourier, gate_images, identity, is_block_diagonal,
                         normalize_circuit, omega_matrix, orthogonal,
                         quad_transform, rotation_gate, squeeze, sum_gate,
                         swap)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
