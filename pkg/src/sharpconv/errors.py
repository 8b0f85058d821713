"""Exception hierarchy.

The CLI maps these onto exit codes: domain problems exit 2, numerical
failures exit 3, failed verifications exit 4.
"""


class SharpConvError(Exception):
    exit_code = 1


class DomainError(SharpConvError, ValueError):
    """Input outside the region where an operation is defined."""

    exit_code = 2


class RegionError(DomainError):
    """A convolution formula was asked for a point outside its region."""


class ConvexityError(DomainError):
    """The surface failed a strict-convexity requirement."""


class IntegrabilityError(DomainError):
    """A trial-function integral does not converge."""


class EvaluationError(SharpConvError, ArithmeticError):
    """An evaluator returned non-finite output."""

    exit_code = 3


class SolverError(SharpConvError, ArithmeticError):
    """Root solve did not converge."""

    exit_code = 3


class QuadratureError(SharpConvError, ArithmeticError):
    """Quadrature did not reach its tolerance.

    ``diagnostics`` carries per-panel or per-level information.
    """

    exit_code = 3

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class VerificationError(SharpConvError, AssertionError):
    exit_code = 4
