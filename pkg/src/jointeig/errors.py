"""Exception types raised across the package."""


class JointeigError(Exception):
    """Base class for all package-specific errors."""


class NonFiniteError(JointeigError):
    """Input contains NaN or Inf entries."""


class SingularError(JointeigError):
    """A matrix that must be inverted or factored is numerically singular."""


class DimensionMismatchError(JointeigError):
    """Operands have incompatible shapes or counts."""


class ZeroColumnError(JointeigError):
    """Column normalization hit an exactly zero column."""


class BiorthogonalityError(JointeigError):
    """|y* x| fell below the threshold for a two-sided quotient."""


class NotSemisimpleError(JointeigError):
    """Block diagonalization failed its residual checks at the requested eigenvalue."""


class NotAnEigenvalueError(JointeigError):
    """No eigenvalue of the combination lies within tolerance of the target."""


class NoConvergenceError(JointeigError):
    """An iterative search exceeded its iteration budget."""


class DenseCapError(JointeigError):
    """An operator determinant would exceed the configured dense-size cap."""


class ShapeMismatchError(JointeigError):
    """A tensor operand does not match the problem's mode sizes."""


class NotDefiniteError(JointeigError):
    """Cholesky factorization failed: the operator determinant is not positive definite."""


class NotSymmetricError(JointeigError):
    """The definite solver requires real symmetric coefficient matrices."""


class NotMonicError(JointeigError):
    """Companion construction requires a monic polynomial."""


class CountMismatchError(JointeigError):
    """Eigenvalue matching requires lists of equal length."""


class ParseError(JointeigError):
    """Malformed input file (JSON syntax), with line/column in the message."""


class SchemaError(JointeigError):
    """Structurally valid JSON that violates the expected schema."""


class KindMismatchError(JointeigError):
    """The file's "kind" field does not match the requested reader."""
