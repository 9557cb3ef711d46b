"""Multiparameter eigenvalue problems via operator determinants.

A d-parameter problem ``A_{i0} x_i = lambda_1 A_{i1} x_i + ... + lambda_d
A_{id} x_i`` (i = 1..d) is reduced to d commuting generalized eigenvalue
problems ``Delta_i z = lambda_i Delta_0 z`` on the tensor-product space of
dimension N = n_1 ... n_d, where the Delta_j are signed permutation sums of
d-fold Kronecker products of the coefficient blocks.  Only ``Delta_0`` and
the random combination ``Delta(mu)`` are ever formed explicitly; the
Rayleigh-quotient numerators use matrix-free tensor mode products.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import dense
from .errors import (
    DenseCapError,
    NotDefiniteError,
    NotSymmetricError,
    ShapeMismatchError,
    SingularError,
)
from .rjea import RQ1, RQ2, RandomCombination, sample_unit_sphere
from .seeds import derive_seed

EXPLICIT_INVERSE = "explicit"
PENCIL = "pencil"
MAX_PARAMETERS = 6  # permutation sums grow as d!, keep desk-scale
DENSE_CAP = 4096


class MepProblem:
    """Coefficient blocks ``A_{ij}`` of a d-parameter eigenvalue problem.

    ``matrices[i][j]`` is the block of equation ``i`` (0-based) and operator
    index ``j = 0..d``; ``j = 0`` is the right-hand operator.  All blocks of
    equation ``i`` are square of size ``sizes[i]``.
    """

    def __init__(self, matrices):
        rows = [list(row) for row in matrices]
        d = len(rows)
        if d < 1:
            raise ValueError("need at least one equation")
        if d > MAX_PARAMETERS:
            raise DenseCapError(f"d = {d} exceeds the supported maximum {MAX_PARAMETERS}")
        sizes = []
        checked = []
        for i, row in enumerate(rows):
            if len(row) != d + 1:
                raise ValueError(f"equation {i} must have d+1 = {d + 1} blocks")
            blocks = []
            n_i = None
            for j, block in enumerate(row):
                m = dense.as_complex_matrix(block, f"A[{i}][{j}]")
                if m.shape[0] != m.shape[1]:
                    raise ValueError(f"A[{i}][{j}] must be square")
                if n_i is None:
                    n_i = m.shape[0]
                elif m.shape[0] != n_i:
                    raise ValueError(f"A[{i}][{j}] size differs within equation {i}")
                blocks.append(m)
            sizes.append(n_i)
            checked.append(tuple(blocks))
        self.matrices = tuple(checked)
        self.d = d
        self.sizes = tuple(sizes)
        self.total_dim = int(np.prod(self.sizes))

    def block(self, i: int, j: int) -> np.ndarray:
        return self.matrices[i][j]

    @property
    def is_real_symmetric(self) -> bool:
        return all(
            np.all(b.imag == 0.0) and np.allclose(b.real, b.real.T, atol=0.0)
            for row in self.matrices
            for b in row
        )


@dataclass(frozen=True)
class MepSolution:
    """All N eigenvalue tuples with per-tuple residual certificates.

    ``residuals[i, k]`` is the scale-invariant smallest-singular-value
    certificate of tuple ``i`` in equation ``k``; ``factors[i][k]`` is the
    corresponding minimizing vector, a candidate decomposed eigenvector.
    """

    eigenvalues: np.ndarray
    residuals: np.ndarray
    factors: list | None
    mode: str
    strategy: str
    combination: RandomCombination | None
    defective_flag: bool = False

    @property
    def count(self) -> int:
        return self.eigenvalues.shape[0]


def _permutation_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def _check_cap(problem: MepProblem, dense_cap: int):
    if problem.total_dim > dense_cap:
        raise DenseCapError(
            f"N = {problem.total_dim} exceeds the dense cap {dense_cap}"
        )


def operator_determinant(problem: MepProblem, column: int, dense_cap: int = DENSE_CAP) -> np.ndarray:
    """Explicit N x N operator determinant.

    ``column = 0`` gives the base determinant of the blocks ``A_{i,1..d}``;
    ``column = j >= 1`` substitutes the right-hand blocks ``A_{i0}`` into
    position ``j``.  The sum runs over all d! permutations in lexicographic
    order with tracked parity.
    """
    _check_cap(problem, dense_cap)
    d = problem.d
    if not 0 <= column <= d:
        raise ValueError(f"column must be in 0..{d}")
    out = np.zeros((problem.total_dim, problem.total_dim), dtype=complex)
    for perm in itertools.permutations(range(1, d + 1)):
        term = None
        for i, c in enumerate(perm):
            block = problem.block(i, 0 if c == column else c)
            term = block if term is None else np.kron(term, block)
        out += _permutation_sign(perm) * term
    return out


def _mode_apply(mat: np.ndarray, tensor: np.ndarray, axis: int) -> np.ndarray:
    # contract mat with the given tensor axis, keeping axis order
    return np.moveaxis(np.tensordot(mat, tensor, axes=(1, axis)), 0, axis)


def _as_tensor(problem: MepProblem, z) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    if arr.shape == tuple(problem.sizes):
        return arr, False
    if arr.ndim == 1 and arr.size == problem.total_dim:
        return arr.reshape(problem.sizes), True
    raise ShapeMismatchError(
        f"operand shape {arr.shape} does not match sizes {problem.sizes}"
    )


def delta_matvec(problem: MepProblem, column: int, z) -> np.ndarray:
    """Apply an operator determinant without forming it.

    Accepts ``z`` either as a tensor of shape ``sizes`` or as a flat vector
    in the Kronecker ordering (last factor's index fastest, i.e. C-order
    flattening) and returns the result in the same form.  Each of the d!
    permutation terms is applied as a sequence of tensor mode products, so
    the cost is O(d! d N max n_i) instead of O(N^2).
    """
    d = problem.d
    if not 0 <= column <= d:
        raise ValueError(f"column must be in 0..{d}")
    tensor, flat = _as_tensor(problem, z)
    out = np.zeros_like(tensor)
    for perm in itertools.permutations(range(1, d + 1)):
        term = tensor
        for i, c in enumerate(perm):
            term = _mode_apply(problem.block(i, 0 if c == column else c), term, i)
        out += _permutation_sign(perm) * term
    return out.reshape(-1) if flat else out


def delta_mu_matvec(problem: MepProblem, mu, z) -> np.ndarray:
    """Apply the random combination ``sum_k mu_k Delta_k`` matrix-free."""
    coeffs = mu.mu if isinstance(mu, RandomCombination) else np.asarray(mu, dtype=complex)
    if coeffs.shape != (problem.d,):
        raise ShapeMismatchError(f"expected {problem.d} coefficients")
    tensor, flat = _as_tensor(problem, z)
    out = np.zeros_like(tensor)
    for k, c in enumerate(coeffs):
        out += c * delta_matvec(problem, k + 1, tensor)
    return out.reshape(-1) if flat else out


def _delta_mu_explicit(problem: MepProblem, mu: np.ndarray, dense_cap: int) -> np.ndarray:
    _check_cap(problem, dense_cap)
    out = np.zeros((problem.total_dim, problem.total_dim), dtype=complex)
    for k, c in enumerate(mu):
        if c != 0.0:
            out += c * operator_determinant(problem, k + 1, dense_cap)
    return out


def _check_delta0_regular(delta0: np.ndarray):
    n = delta0.shape[0]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", la.LinAlgWarning)
            lu, piv = la.lu_factor(delta0)
    except la.LinAlgError as exc:  # pragma: no cover
        raise SingularError(str(exc)) from exc
    pivots = np.abs(np.diag(lu))
    tiny = n * dense.UNIT_ROUNDOFF * float(np.linalg.norm(delta0))
    if pivots.min() <= tiny:
        raise SingularError(
            "base operator determinant is numerically singular "
            f"(condition estimate >= {pivots.max() / max(pivots.min(), 1e-300):.3e}); "
            "this is a singular problem, outside the regular solver's scope"
        )
    return lu, piv


def mep_residual(problem: MepProblem, lam) -> tuple[np.ndarray, list]:
    """Per-equation residual certificate for a candidate eigenvalue tuple.

    For ``W_i = A_{i0} - sum_k lam_k A_{ik}`` returns
    ``sigma_min(W_i) / max(1, sum_j ||A_{ij}||_2)`` together with the
    minimizing right singular vectors (candidate decomposed eigenvectors).
    """
    lam = np.asarray(lam, dtype=complex)
    residuals = np.empty(problem.d)
    factors = []
    for i in range(problem.d):
        w = problem.block(i, 0).copy()
        for k in range(problem.d):
            w -= lam[k] * problem.block(i, k + 1)
        sigma, vec = dense.svd_min(w)
        scale = max(1.0, sum(np.linalg.norm(problem.block(i, j), 2) for j in range(problem.d + 1)))
        residuals[i] = sigma / scale
        factors.append(vec)
    return residuals, factors


def solve_mep(
    problem: MepProblem,
    mode: str = RQ2,
    seed: int = 0,
    strategy: str | None = None,
    dense_cap: int = DENSE_CAP,
    with_factors: bool = False,
) -> MepSolution:
    """Solve a regular problem through one random combination.

    Forms ``Delta_0`` and ``Delta(mu)`` explicitly and takes left/right
    eigenvector pairs either of the pencil ``(Delta(mu), Delta_0)`` (QZ;
    avoids inverting ``Delta_0``) or of ``Delta_0^{-1} Delta(mu)``.  Each
    tuple component is the generalized quotient
    ``(w_i* Delta_k z_i) / (w_i* Delta_0 z_i)`` with matrix-free numerators.
    A numerically singular ``Delta_0`` raises ``SingularError``; a defective
    combination falls back to generalized one-sided quotients with a flag.
    """
    if mode not in (RQ1, RQ2):
        raise ValueError("mode must be RQ1 or RQ2")
    if strategy is None:
        strategy = PENCIL if problem.total_dim <= 1024 else EXPLICIT_INVERSE
    if strategy not in (PENCIL, EXPLICIT_INVERSE):
        raise ValueError("strategy must be 'pencil' or 'explicit'")
    combination = sample_unit_sphere(problem.d, seed)
    delta0 = operator_determinant(problem, 0, dense_cap)
    lu_piv = _check_delta0_regular(delta0)
    delta_mu = _delta_mu_explicit(problem, combination.mu, dense_cap)

    defective = False
    if strategy == PENCIL:
        values, vl, vr = la.eig(delta_mu, delta0, left=True, right=True)
        order = np.lexsort((values.imag, values.real))
        values = values[order]
        right = vr[:, order]
        left = vl[:, order]
    else:
        gamma = la.lu_solve(lu_piv, delta_mu)
        decomp = dense.eig(gamma)
        order = np.lexsort((decomp.values.imag, decomp.values.real))
        values = decomp.values[order]
        right = decomp.right_vectors[:, order]
        defective = decomp.defective
        # left vectors of the pencil: Delta_0^{-*} times left vectors of Gamma
        left = la.lu_solve(lu_piv, decomp.left_vectors[:, order], trans=2)

    n_eigs = values.shape[0]
    eigenvalues = np.empty((n_eigs, problem.d), dtype=complex)
    used_mode = RQ1 if (defective and mode == RQ2) else mode
    for i in range(n_eigs):
        z = right[:, i]
        w = left[:, i] if used_mode == RQ2 else z
        den = w.conj() @ delta_matvec(problem, 0, z)
        if abs(den) < n_eigs * dense.UNIT_ROUNDOFF * np.linalg.norm(w) * np.linalg.norm(z) * np.linalg.norm(delta0):
            # near-defective pair: fall back to the one-sided quotient
            defective = True
            w = z
            den = w.conj() @ delta_matvec(problem, 0, z)
        for k in range(problem.d):
            eigenvalues[i, k] = (w.conj() @ delta_matvec(problem, k + 1, z)) / den

    residuals = np.empty((n_eigs, problem.d))
    factors = [] if with_factors else None
    for i in range(n_eigs):
        res, vecs = mep_residual(problem, eigenvalues[i])
        residuals[i] = res
        if with_factors:
            factors.append(vecs)
    return MepSolution(
        eigenvalues=eigenvalues,
        residuals=residuals,
        factors=factors,
        mode=used_mode,
        strategy=strategy,
        combination=combination,
        defective_flag=defective,
    )


def right_definite_solve(problem: MepProblem, seed: int = 0, dense_cap: int = DENSE_CAP) -> MepSolution:
    """Symmetric path for real symmetric blocks with a definite base operator.

    Cholesky-factors ``Delta_0 = V V^T``, transforms each ``Delta_k`` to the
    symmetric ``D_k = V^{-1} Delta_k V^{-T}``, diagonalizes a real random
    combination ``D(mu)`` orthogonally and reads the tuples off
    ``q_i^T D_k q_i``.
    """
    if not problem.is_real_symmetric:
        raise NotSymmetricError("all coefficient blocks must be real symmetric")
    delta0 = operator_determinant(problem, 0, dense_cap).real
    try:
        v = la.cholesky(delta0, lower=True)
    except la.LinAlgError as exc:
        raise NotDefiniteError("base operator determinant is not positive definite") from exc

    transformed = []
    for k in range(problem.d):
        dk = operator_determinant(problem, k + 1, dense_cap).real
        half = la.solve_triangular(v, dk, lower=True)
        dk_t = la.solve_triangular(v, half.T, lower=True).T
        transformed.append(0.5 * (dk_t + dk_t.T))

    rng = np.random.default_rng(derive_seed(seed, 0))
    mu = rng.standard_normal(problem.d)
    mu /= np.linalg.norm(mu)
    d_mu = sum(c * dk for c, dk in zip(mu, transformed))
    _, q = la.eigh(d_mu)

    n_eigs = delta0.shape[0]
    eigenvalues = np.empty((n_eigs, problem.d), dtype=complex)
    for k, dk in enumerate(transformed):
        eigenvalues[:, k] = np.einsum("ij,ij->j", q, dk @ q)
    order = np.lexsort((eigenvalues[:, -1].real, eigenvalues[:, 0].real))
    eigenvalues = eigenvalues[order]

    residuals = np.empty((n_eigs, problem.d))
    for i in range(n_eigs):
        residuals[i], _ = mep_residual(problem, eigenvalues[i])
    return MepSolution(
        eigenvalues=eigenvalues,
        residuals=residuals,
        factors=None,
        mode="definite",
        strategy="cholesky",
        combination=RandomCombination(mu.astype(complex), int(seed)),
    )


def three_param_random_problem(n: int, seed: int = 0) -> MepProblem:
    """Random three-parameter problem with near-identity diagonal blocks.

    Each block is ``Q D Q^T + delta_{ij} I`` with ``Q`` Haar orthogonal and
    ``D`` diagonal uniform on ``[-1/(2n), 1/(2n)]``, so diagonal blocks
    cluster around the identity and the base determinant stays regular.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(1, 4):
        row = []
        for j in range(0, 4):
            q, r = la.qr(rng.standard_normal((n, n)))
            q = q * np.sign(np.diag(r))
            diag = rng.uniform(-0.5 / n, 0.5 / n, size=n)
            block = (q * diag) @ q.T
            if i == j:
                block = block + np.eye(n)
            row.append(block)
        rows.append(row)
    return MepProblem(rows)
