"""Exception types shared across the package."""

from __future__ import annotations


class QsdError(Exception):
    """Base class for all errors raised by this package."""


class NonSquareError(QsdError):
    """A square matrix was required."""


class NotHermitianError(QsdError):
    """Asymmetry exceeds the Hermitian tolerance; the input is corrupted."""


class NotPsdError(QsdError):
    """An eigenvalue lies below the PSD clamping tolerance."""


class SingularMatrixError(QsdError):
    """Matrix is numerically singular; no inverse square root exists."""


class SpanDeficientError(QsdError):
    """The state eigenvectors do not span the full space.

    Carries the rank of the spanned subspace so callers can deflate.
    """

    def __init__(self, span_rank: int, dim: int):
        super().__init__(
            f"state eigenvectors span a {span_rank}-dimensional subspace "
            f"of a {dim}-dimensional space"
        )
        self.span_rank = span_rank
        self.dim = dim


class BadRanksError(QsdError):
    """Requested ranks are inconsistent with the target dimension."""


class BadPriorsError(QsdError):
    """Priors are not strictly positive or do not sum to one."""


class DimMismatchError(QsdError):
    """Operator dimensions do not agree."""


class CountMismatchError(QsdError):
    """State and measurement-operator counts do not agree."""


class NotBinaryError(QsdError):
    """Exactly two states are required."""


class NotConvergedError(QsdError):
    """Solver failed to certify optimality within its iteration budget.

    ``solve_optimal`` itself never raises this; it returns the best iterate
    with ``converged=False``. The class is provided for callers that prefer a
    hard failure and carries the best iterate when raised.
    """

    def __init__(self, message: str, povm=None, certificate=None, diagnostics=None):
        super().__init__(message)
        self.povm = povm
        self.certificate = certificate
        self.diagnostics = diagnostics
