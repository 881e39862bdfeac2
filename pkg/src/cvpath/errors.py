"""Exception types shared across the package."""


class CvPathError(Exception):
    """Base class for all package errors."""


class WidthMismatchError(CvPathError):
    """Operands declare different mode counts."""


class MissingVariableError(CvPathError):
    """A substitution map does not cover a variable present in the polynomial."""


class NotSymplecticError(CvPathError):
    """A matrix fails the symplectic condition S^T Omega S = Omega."""


class UnsupportedCoherenceError(CvPathError):
    """Gaussian gate mixes position and momentum beyond a single-mode rotation."""


class GuardExceededError(CvPathError):
    """A configured resource guard (terms, degree, Fock dimension) was hit."""


class ConvergenceError(CvPathError):
    """Fock cutoff doubling reached the guard without converging."""


class InvalidStateError(CvPathError):
    """Gaussian state specification violates symmetry or the uncertainty relation."""


class ParseError(CvPathError):
    """Circuit file syntax or semantic error, carrying a line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")
