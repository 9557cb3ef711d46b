"""Condition numbers, separation quantities and first-order error bounds.

For a semisimple joint eigenvalue ``lam`` of multiplicity ``p`` there are
invertible ``X = [X1 X2]``, ``Y = [Y1 Y2]`` with orthonormal ``X1``,
``Y* X = I`` and ``Y* A_k X = blockdiag(lam_k I_p, A22_k)``.  From this
block diagonalization follow the eigenvalue condition number
``kappa(lam) = ||X1 Y1*||_2 = ||Y1||_2``, the first-order bounds for the
one- and two-sided quotient errors, and first-order predictors for the
perturbed eigenvector bases that serve as oracles in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import dense
from .errors import NotAnEigenvalueError, NotSemisimpleError
from .rjea import CommutingFamily, RandomCombination, linear_combination, sample_unit_sphere


@dataclass(frozen=True)
class BlockDiagonalization:
    """Bases splitting a family at one semisimple joint eigenvalue."""

    x1: np.ndarray
    x2: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    lam: np.ndarray
    p: int
    a22_blocks: tuple[np.ndarray, ...]

    @property
    def n(self) -> int:
        return self.x1.shape[0]

    @property
    def d(self) -> int:
        return self.lam.shape[0]


@dataclass(frozen=True)
class BoundReport:
    """First-order error bounds at noise level ``epsilon``.

    ``rq2_bound = ||y_i|| * eps`` bounds the two-sided quotient error;
    ``rq1_bound = (1 + sqrt(d) ||X2|| ||Y2|| / d_mu) * eps`` bounds the
    one-sided one, where ``d_mu`` is the directional separation of the
    tuple under the sampled combination.
    """

    rq2_bound: float
    rq1_bound: float
    d_mu: float
    kappa_lambda: float
    epsilon: float


def block_diagonalize(
    family: CommutingFamily, lam, tol: float, seed: int = 0
) -> BlockDiagonalization:
    """Construct the block-diagonalizing bases at the joint eigenvalue ``lam``.

    Samples a combination, groups the eigenvalues of ``A(mu)`` within
    ``tol * ||A(mu)||_F`` of ``mu . lam`` (scalar grouping suffices: for
    generic ``mu``, collisions of combination eigenvalues mirror collisions
    of tuples), orthonormalizes the grouped eigenvectors as ``X1`` and
    derives ``Y = X^{-*}``.  The block structure is verified a posteriori;
    failure raises ``NotSemisimpleError``.
    """
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != (family.d,):
        raise ValueError(f"lam must have length d={family.d}")
    combination = sample_unit_sphere(family.d, seed)
    a_mu = linear_combination(family, combination)
    decomp = dense.eig(a_mu)
    lam_mu = combination.mu @ lam
    scale = float(np.linalg.norm(a_mu))
    group = np.nonzero(np.abs(decomp.values - lam_mu) <= tol * scale)[0]
    if group.size == 0:
        raise NotAnEigenvalueError(
            f"no eigenvalue of the combination within {tol:g} * scale of the target"
        )
    rest = np.setdiff1d(np.arange(family.n), group)
    p = int(group.size)

    x1, _ = la.qr(decomp.right_vectors[:, group], mode="economic")
    x = np.hstack([x1, decomp.right_vectors[:, rest]])
    try:
        y = la.inv(x).conj().T
    except la.LinAlgError as exc:
        raise NotSemisimpleError("eigenvector basis is numerically singular") from exc
    y1, y2 = y[:, :p], y[:, p:]
    x2 = x[:, p:]

    if np.linalg.norm(x1.conj().T @ x1 - np.eye(p)) > 1e-10:
        raise NotSemisimpleError("orthonormality of X1 failed")
    a22_blocks = []
    for k, (m, lam_k) in enumerate(zip(family.matrices, lam)):
        transformed = y.conj().T @ m @ x
        a22 = transformed[p:, p:]
        block = np.zeros_like(transformed)
        block[:p, :p] = lam_k * np.eye(p)
        block[p:, p:] = a22
        if np.linalg.norm(transformed - block) > 1e-8 * np.linalg.norm(m):
            raise NotSemisimpleError(
                f"off-diagonal residual too large for matrix {k}; "
                "the eigenvalue is defective or mismatched"
            )
        a22_blocks.append(a22)
    return BlockDiagonalization(x1, x2, y1, y2, lam, p, tuple(a22_blocks))


def spectral_projector(bd: BlockDiagonalization) -> tuple[np.ndarray, float]:
    """Oblique projector ``P = X1 Y1*`` onto the common eigenspace, and ``||P||_2``."""
    p = bd.x1 @ bd.y1.conj().T
    return p, float(np.linalg.norm(p, 2))


def _directional_separations(joint_eigs: np.ndarray, target_index: int) -> tuple[np.ndarray, np.ndarray]:
    # unit directions from the target to every distinct tuple
    tuples = np.asarray(joint_eigs, dtype=complex)
    target = tuples[target_index]
    diffs = tuples - target
    norms = np.linalg.norm(diffs, axis=1)
    cutoff = 1e-14 * max(1.0, float(np.max(np.linalg.norm(tuples, axis=1))))
    keep = norms > cutoff
    return diffs[keep], norms[keep]


def separation_d_mu(joint_eigs, target_index: int, mu) -> float:
    """Directional separation ``min_j |mu . (lam_j - lam)| / ||lam_j - lam||``.

    Tuples equal to the target (within ``1e-14`` of the largest tuple norm)
    are excluded; returns +inf when no distinct tuple remains.  Always at
    most 1 for a unit combination, by Cauchy-Schwarz.
    """
    coeffs = mu.mu if isinstance(mu, RandomCombination) else np.asarray(mu, dtype=complex)
    diffs, norms = _directional_separations(np.asarray(joint_eigs, dtype=complex), target_index)
    if diffs.shape[0] == 0:
        return np.inf
    return float(np.min(np.abs(diffs @ coeffs) / norms))


def separation_d_mu_samples(joint_eigs, target_index: int, mus: np.ndarray) -> np.ndarray:
    """Vectorized ``separation_d_mu`` over rows of ``mus`` (shape samples x d)."""
    diffs, norms = _directional_separations(np.asarray(joint_eigs, dtype=complex), target_index)
    if diffs.shape[0] == 0:
        return np.full(mus.shape[0], np.inf)
    return np.min(np.abs(mus @ diffs.T) / norms, axis=1)


def evaluate_bounds(
    bd: BlockDiagonalization,
    joint_eigs,
    mu,
    epsilon: float,
    left_norm: float,
) -> BoundReport:
    """Evaluate the first-order RQ1/RQ2 bounds for the eigenvalue of ``bd``."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    tuples = np.asarray(joint_eigs, dtype=complex)
    target_index = int(np.argmin(np.linalg.norm(tuples - bd.lam, axis=1)))
    d_mu = separation_d_mu(tuples, target_index, mu)
    x2y2 = float(np.linalg.norm(bd.x2, 2) * np.linalg.norm(bd.y2, 2))
    _, kappa = spectral_projector(bd)
    rq1 = (1.0 + np.sqrt(bd.d) * x2y2 / d_mu) * epsilon if np.isfinite(d_mu) else epsilon
    return BoundReport(
        rq2_bound=float(left_norm * epsilon),
        rq1_bound=float(rq1),
        d_mu=float(d_mu),
        kappa_lambda=kappa,
        epsilon=float(epsilon),
    )


def failure_probability_rq1(n: int, p: int, d: int, big_r: float) -> float:
    """Failure-probability bound ``min(1, (n-p)(d-1)d / R^2)`` for the RQ1 tail."""
    if big_r <= 0:
        raise ValueError("R must be > 0")
    if not (n >= p >= 1 and d >= 1):
        raise ValueError("need n >= p >= 1 and d >= 1")
    return min(1.0, (n - p) * (d - 1) * d / big_r**2)


def predict_perturbed_eigvectors(
    a, e, epsilon: float, bd: BlockDiagonalization, lambda_mu: complex
) -> tuple[np.ndarray, np.ndarray]:
    """First-order predictions of the perturbed right/left eigenbases.

    For ``A + eps E`` with ``A`` block diagonalized by ``bd`` at the
    eigenvalue ``lambda_mu``:

        X1_pred = X1 - eps X2 (A22 - lambda I)^{-1} Y2* E X1
        Y1_pred* = Y1* - eps Y1* E X2 (A22 - lambda I)^{-1} Y2*

    The distance between the predicted and the actual perturbed eigenspace
    shrinks quadratically in ``eps``, which the tests use as an oracle.
    """
    a = dense.as_complex_matrix(a, "A")
    e = dense.as_complex_matrix(e, "E")
    a22 = bd.y2.conj().T @ a @ bd.x2
    m = a22 - lambda_mu * np.eye(a22.shape[0])
    rhs_x = bd.y2.conj().T @ e @ bd.x1
    sol_x = dense.solve(m, rhs_x)
    x1_pred = bd.x1 - epsilon * bd.x2 @ sol_x
    rhs_y = bd.x2.conj().T @ e.conj().T @ bd.y1
    sol_y = dense.solve(m.conj().T, rhs_y)
    y1_pred = bd.y1 - epsilon * bd.y2 @ sol_y
    return x1_pred, y1_pred


def semisimple_expansion_eta(e_mu, x1, y1) -> np.ndarray:
    """First-order eigenvalue displacements: eigenvalues of ``Y1* E X1``.

    Under a perturbation ``A + eps E``, the ``p`` eigenvalues emerging from
    a semisimple eigenvalue move by ``eps * eta_i + o(eps)``.
    """
    x1 = np.asarray(x1, dtype=complex)
    y1 = np.asarray(y1, dtype=complex)
    p = x1.shape[1]
    if np.linalg.norm(y1.conj().T @ x1 - np.eye(p)) > 1e-10:
        raise ValueError("Y1* X1 must equal the identity within 1e-10")
    return np.linalg.eigvals(y1.conj().T @ np.asarray(e_mu, dtype=complex) @ x1)


def subspace_distance(u, v) -> float:
    """Sine of the largest principal angle between the column spans.

    Computed as the largest singular value of ``(I - Q_u Q_u*) Q_v``, which
    stays accurate for tiny angles (no ``sqrt(1 - s^2)`` cancellation).
    """
    qu, _ = la.qr(np.asarray(u, dtype=complex), mode="economic")
    qv, _ = la.qr(np.asarray(v, dtype=complex), mode="economic")
    resid = qv - qu @ (qu.conj().T @ qv)
    s = np.linalg.svd(resid, compute_uv=False)
    return float(np.clip(s[0], 0.0, 1.0))


__all__ = [
    "BlockDiagonalization",
    "BoundReport",
    "block_diagonalize",
    "spectral_projector",
    "separation_d_mu",
    "separation_d_mu_samples",
    "evaluate_bounds",
    "failure_probability_rq1",
    "predict_perturbed_eigvectors",
    "semisimple_expansion_eta",
    "subspace_distance",
]
