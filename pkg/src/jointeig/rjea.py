"""Joint eigenvalues of nearly commuting families via random combinations.

The solver eigendecomposes a single random unit-sphere linear combination
``A(mu) = mu_1 A_1 + ... + mu_d A_d`` and reads each joint eigenvalue tuple
off Rayleigh quotients of the resulting eigenvector pairs: one-sided
``x* A_k x`` (RQ1) or two-sided ``y* A_k x`` with ``y* x = 1`` (RQ2).  For
families that commute, the tuples are exact up to the conditioning of the
eigenvector basis; for nearly commuting input the two-sided quotients carry
a first-order error of ``||y_i|| * eps`` while the one-sided ones pick up an
extra factor governed by the directional separation of the tuples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import dense
from .errors import BiorthogonalityError, DimensionMismatchError

RQ1 = "RQ1"
RQ2 = "RQ2"
_MODES = (RQ1, RQ2)


def commutator_residual(matrices) -> float:
    """Max over pairs of ``||A_j A_k - A_k A_j||_F / (||A_j||_F ||A_k||_F)``.

    Zero for a single matrix; pairs involving a zero matrix contribute 0.
    """
    mats = list(matrices)
    norms = [float(np.linalg.norm(m)) for m in mats]
    worst = 0.0
    for j in range(len(mats)):
        for k in range(j + 1, len(mats)):
            if norms[j] == 0.0 or norms[k] == 0.0:
                continue
            comm = mats[j] @ mats[k] - mats[k] @ mats[j]
            worst = max(worst, float(np.linalg.norm(comm)) / (norms[j] * norms[k]))
    return worst


class CommutingFamily:
    """Ordered family of d same-size square complex matrices.

    The normalized commutator residual is computed on construction; it is a
    diagnostic, not a gate: families far from commuting are still accepted
    and solved, with the residual reported alongside the output.
    """

    def __init__(self, matrices):
        mats = tuple(dense.as_complex_matrix(m, f"matrix {i}") for i, m in enumerate(matrices))
        if not mats:
            raise DimensionMismatchError("family must contain at least one matrix")
        n = mats[0].shape[0]
        for i, m in enumerate(mats):
            if m.shape != (n, n):
                raise DimensionMismatchError(
                    f"matrix {i} has shape {m.shape}, expected ({n}, {n})"
                )
        self.matrices = mats
        self.d = len(mats)
        self.n = n
        self.commutator_residual = commutator_residual(mats)

    @property
    def is_real(self) -> bool:
        return all(np.all(m.imag == 0.0) for m in self.matrices)

    def frobenius_norms(self) -> np.ndarray:
        return np.array([np.linalg.norm(m) for m in self.matrices])


@dataclass(frozen=True)
class RandomCombination:
    """Unit-norm complex coefficient vector and the seed that produced it."""

    mu: np.ndarray
    seed: int

    @property
    def d(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class JointEigenResult:
    """Joint-eigenvalue tuples with per-tuple diagnostics.

    ``tuples[i]`` is the i-th d-tuple, ordered by ascending (real, imag)
    part of the combination eigenvalue ``combination_values[i]``.
    ``left_norms[i] = ||y_i||_2`` is the two-sided conditioning diagnostic;
    ``defective_flag`` records that the eigenvector basis was numerically
    singular and the mode was forced to RQ1.
    """

    tuples: np.ndarray
    mode: str
    combination: RandomCombination
    left_norms: np.ndarray
    combination_values: np.ndarray
    defective_flag: bool
    commutator_residual: float

    @property
    def n(self) -> int:
        return self.tuples.shape[0]


def sample_unit_sphere(d: int, seed: int) -> RandomCombination:
    """Draw mu uniformly from the complex unit sphere, deterministically."""
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = np.random.default_rng(seed)
    g = dense.complex_gaussian(d, rng)
    return RandomCombination(g / np.linalg.norm(g), int(seed))


def linear_combination(family: CommutingFamily, mu) -> np.ndarray:
    """Entrywise weighted sum ``mu_1 A_1 + ... + mu_d A_d``."""
    coeffs = mu.mu if isinstance(mu, RandomCombination) else np.asarray(mu, dtype=complex)
    if coeffs.shape != (family.d,):
        raise DimensionMismatchError(
            f"combination has {coeffs.shape[0]} coefficients for d={family.d}"
        )
    out = np.zeros((family.n, family.n), dtype=complex)
    for c, m in zip(coeffs, family.matrices):
        out += c * m
    return out


def rayleigh_one_sided(family: CommutingFamily, x) -> np.ndarray:
    """Tuple of quadratic forms ``x* A_k x`` for a unit vector ``x``."""
    v = np.asarray(x, dtype=complex)
    return np.array([v.conj() @ (m @ v) for m in family.matrices])


def rayleigh_two_sided(family: CommutingFamily, x, y) -> np.ndarray:
    """Tuple of ``(y* A_k x) / (y* x)``.

    Raises ``BiorthogonalityError`` when ``|y* x|`` falls below
    ``1e-14 ||x|| ||y||``, the signature of a near-defective pair.
    """
    vx = np.asarray(x, dtype=complex)
    vy = np.asarray(y, dtype=complex)
    denom = vy.conj() @ vx
    if abs(denom) < 1e-14 * np.linalg.norm(vx) * np.linalg.norm(vy):
        raise BiorthogonalityError(f"|y* x| = {abs(denom):.3e} is below threshold")
    return np.array([(vy.conj() @ (m @ vx)) / denom for m in family.matrices])


def _sort_by_value(values: np.ndarray) -> np.ndarray:
    # ascending real part, then imaginary part; stable for exact ties
    return np.lexsort((values.imag, values.real))


def _quotient_tuples(family: CommutingFamily, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    # column i of `left`/`right` -> tuple i; assumes diag(left* right) = 1
    # (RQ2) or left == right with unit columns (RQ1)
    cols = []
    for m in family.matrices:
        cols.append(np.einsum("ij,ij->j", left.conj(), m @ right))
    return np.stack(cols, axis=1)


def rjea(
    family: CommutingFamily,
    mode: str = RQ2,
    seed: int = 0,
    cluster_tol: float | None = None,
) -> JointEigenResult:
    """Approximate all joint eigenvalues from one random combination.

    Samples ``mu`` on the complex unit sphere, eigendecomposes ``A(mu)``
    with unit right columns and ``Y* X = I``, and returns the per-vector
    Rayleigh-quotient tuples for the requested mode.  If the eigenvector
    basis is numerically singular the mode is forced to RQ1 and
    ``defective_flag`` is set.  ``cluster_tol`` optionally groups
    eigenvalues of the combination closer than ``cluster_tol * ||A(mu)||_F``
    and orthonormalizes each group's eigenvectors; exact collisions have
    probability zero for random ``mu``, so this is off by default.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    combination = sample_unit_sphere(family.d, seed)
    a_mu = linear_combination(family, combination)
    decomp = dense.eig(a_mu)
    if cluster_tol is not None:
        decomp = cluster_and_orthonormalize(
            decomp, cluster_tol, scale=float(np.linalg.norm(a_mu))
        )
    order = _sort_by_value(decomp.values)
    values = decomp.values[order]
    x = decomp.right_vectors[:, order]
    y = decomp.left_vectors[:, order]

    used_mode = RQ1 if decomp.defective else mode
    if used_mode == RQ2:
        tuples = _quotient_tuples(family, y, x)
    else:
        tuples = _quotient_tuples(family, x, x)
    return JointEigenResult(
        tuples=tuples,
        mode=used_mode,
        combination=combination,
        left_norms=np.linalg.norm(y, axis=0),
        combination_values=values,
        defective_flag=decomp.defective,
        commutator_residual=family.commutator_residual,
    )


def cluster_and_orthonormalize(
    decomp: dense.EigenDecomposition, tol: float, scale: float | None = None
) -> dense.EigenDecomposition:
    """Orthonormalize eigenvector groups of (nearly) multiple eigenvalues.

    Eigenvalues whose pairwise distance is at most ``tol * scale`` are
    grouped (``scale`` defaults to the 2-norm of the eigenvalue vector, a
    stand-in for the Frobenius norm of the matrix that produced the
    decomposition).  Within each group the right-vector columns are replaced
    by an orthonormal basis of their span, keeping the original column
    order, and the left vectors are recomputed so that ``Y* X = I``.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    values = decomp.values
    n = values.shape[0]
    if scale is None:
        scale = float(np.linalg.norm(values))
    threshold = tol * scale

    # union-find over pairs within threshold
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    if all(len(g) == 1 for g in groups.values()):
        return decomp

    x = decomp.right_vectors.copy()
    for root in sorted(groups):
        idx = groups[root]
        if len(idx) == 1:
            continue
        q, _ = la.qr(x[:, idx], mode="economic")
        x[:, idx] = q
    y = la.inv(x).conj().T
    c = np.einsum("ij,ij->j", y.conj(), x)
    y = y / c.conj()
    return dense.EigenDecomposition(
        values=values,
        right_vectors=x,
        left_vectors=y,
        condition_estimate=dense.cond2(x),
        defective=decomp.defective,
    )
