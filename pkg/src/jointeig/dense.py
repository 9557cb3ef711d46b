"""Dense complex linear-algebra substrate.

Everything above this module (random-combination solvers, operator
determinants, root extraction) is written against the small set of
contracts here: eigendecompositions with biorthogonal left/right vectors,
linear solves with a singularity guard, Kronecker products, smallest
singular pairs, 2-norm condition numbers and column normalization.  The
eigenvalue backend is LAPACK via scipy; the rest of the package depends
only on the contracts, not on the backend.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import NonFiniteError, SingularError, ZeroColumnError

UNIT_ROUNDOFF = 2.0**-53


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert input to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return m


def _square(a, name: str = "matrix") -> np.ndarray:
    m = as_complex_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussian array: real/imag parts i.i.d. N(0, 1/2)."""
    scale = np.sqrt(0.5)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues with biorthogonal right/left eigenvector matrices.

    ``right_vectors`` has unit 2-norm columns; ``left_vectors`` is the
    inverse conjugate transpose of ``right_vectors`` with each column
    rescaled so that ``left_vectors[:, i]* @ right_vectors[:, i] == 1``.
    ``condition_estimate`` is the 2-norm condition number of
    ``right_vectors``; ``defective`` flags the regime where it exceeds
    ``1 / (n * u)`` and two-sided quotients become unreliable.
    """

    values: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    condition_estimate: float
    defective: bool = False

    @property
    def n(self) -> int:
        return self.values.shape[0]


def normalize_columns(a) -> np.ndarray:
    """Scale every column to unit 2-norm by a positive real factor."""
    m = as_complex_matrix(a)
    norms = np.linalg.norm(m, axis=0)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise ZeroColumnError(f"column {zero[0]} is exactly zero")
    return m / norms


def cond2(a) -> float:
    """Ratio of extreme singular values; +inf when the smallest is 0."""
    m = as_complex_matrix(a)
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] == 0.0:
        return np.inf
    return float(s[0] / s[-1])


def eig(a) -> EigenDecomposition:
    """Eigendecomposition with unit right columns and rescaled left vectors.

    Satisfies ``A X = X diag(values)`` to backend accuracy and
    ``diag(Y* X) = 1`` exactly up to roundoff.  When the right-eigenvector
    matrix is numerically singular (condition above ``1/(n u)``) the result
    is flagged ``defective``; values and right vectors remain usable and
    callers fall back to one-sided quotients.
    """
    m = _square(a)
    n = m.shape[0]
    values, x = la.eig(m)
    x = normalize_columns(x)
    condition = cond2(x)
    defective = (not np.isfinite(condition)) or condition > 1.0 / (n * UNIT_ROUNDOFF)
    try:
        y = la.inv(x).conj().T
    except la.LinAlgError:
        y = np.linalg.pinv(x).conj().T
        defective = True
    # enforce y_i* x_i = 1 exactly in the diagonal
    c = np.einsum("ij,ij->j", y.conj(), x)
    bad = np.abs(c) < n * UNIT_ROUNDOFF
    if np.any(bad):
        defective = True
        c = np.where(bad, 1.0, c)
    y = y / c.conj()
    return EigenDecomposition(values, x, y, condition, defective)


def solve(a, b) -> np.ndarray:
    """Solve ``A X = B`` with an explicit pivot-size singularity guard."""
    m = _square(a, "A")
    rhs = as_complex_matrix(np.atleast_2d(b), "B")
    n = m.shape[0]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", la.LinAlgWarning)
            lu, piv = la.lu_factor(m)
    except la.LinAlgError as exc:  # pragma: no cover - lapack failures
        raise SingularError(str(exc)) from exc
    tiny = n * UNIT_ROUNDOFF * float(np.linalg.norm(m))
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= tiny:
        raise SingularError(
            f"pivot {pivots.min():.3e} below threshold {tiny:.3e}"
        )
    return la.lu_solve((lu, piv), rhs)


def kron(a, b) -> np.ndarray:
    """Kronecker product with the usual (row-major, last-index-fastest) layout."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def svd_min(a) -> tuple[float, np.ndarray]:
    """Smallest singular value and its right singular vector."""
    m = as_complex_matrix(a)
    _, s, vh = np.linalg.svd(m)
    return float(s[-1]), vh[-1].conj()


def generalized_eig(a, b) -> EigenDecomposition:
    """Eigendecomposition of the pencil ``(A, B)`` with nonsingular ``B``.

    Realized as ``eig(solve(B, A))``, which matches the pencil eigenvalues
    whenever ``B`` is well enough conditioned for the solve to succeed.
    """
    m_a = _square(a, "A")
    m_b = _square(b, "B")
    if m_a.shape != m_b.shape:
        raise ValueError(f"shape mismatch: {m_a.shape} vs {m_b.shape}")
    return eig(solve(m_b, m_a))
