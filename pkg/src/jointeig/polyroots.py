"""Root extraction for 0-dimensional polynomial systems.

The inputs are multiplication matrices on the quotient ring of the system's
ideal: multiplication by the coordinate functions gives a commuting family
whose joint eigenvalues are exactly the common roots.  Construction of
multiplication matrices for general systems is upstream of this package;
for testing, a grid constructor builds the exactly commuting family of a
decoupled system from companion matrices.  Plain Schur-diagonal readings of
a single matrix (or a random combination) serve as baselines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import dense
from .errors import NotMonicError
from .mep import MepProblem, solve_mep
from .rjea import RQ2, CommutingFamily, JointEigenResult, commutator_residual
from .rjea import linear_combination, rjea, sample_unit_sphere
from .seeds import derive_seed

FIRST_MATRIX = "first"
RANDOM_COMBINATION = "random"


class MultiplicationFamily:
    """Multiplication matrices of the s coordinate functions."""

    def __init__(self, matrices, basis_note: str | None = None):
        mats = tuple(dense.as_complex_matrix(m, f"matrix {i}") for i, m in enumerate(matrices))
        if not mats:
            raise ValueError("need at least one multiplication matrix")
        m = mats[0].shape[0]
        for i, mat in enumerate(mats):
            if mat.shape != (m, m):
                raise ValueError(f"matrix {i} has shape {mat.shape}, expected ({m}, {m})")
        self.matrices = mats
        self.s = len(mats)
        self.m = m
        self.basis_note = basis_note
        self.commutator_residual = commutator_residual(mats)

    def as_commuting_family(self) -> CommutingFamily:
        return CommutingFamily(self.matrices)


@dataclass(frozen=True)
class PolynomialSystem:
    """Sparse multivariate polynomials as (coefficient, exponent-vector) terms."""

    s: int
    polynomials: tuple

    def __post_init__(self):
        for p_idx, poly in enumerate(self.polynomials):
            seen = set()
            for coeff, exps in poly:
                exps = tuple(int(e) for e in exps)
                if len(exps) != self.s:
                    raise ValueError(
                        f"polynomial {p_idx}: exponent vector {exps} has wrong length"
                    )
                if any(e < 0 for e in exps):
                    raise ValueError(f"polynomial {p_idx}: negative exponent")
                if exps in seen:
                    raise ValueError(f"polynomial {p_idx}: duplicate monomial {exps}")
                seen.add(exps)

    @classmethod
    def from_grid(cls, univariate_coeffs) -> "PolynomialSystem":
        """Decoupled system {p_k(x_k) = 0} from descending coefficient lists."""
        s = len(univariate_coeffs)
        polys = []
        for k, coeffs in enumerate(univariate_coeffs):
            coeffs = np.asarray(coeffs, dtype=complex)
            deg = coeffs.shape[0] - 1
            terms = []
            for power, c in enumerate(coeffs[::-1]):
                if c == 0 and power != deg:
                    continue
                exps = [0] * s
                exps[k] = power
                terms.append((complex(c), tuple(exps)))
            polys.append(tuple(terms))
        return cls(s, tuple(polys))


def companion(coeffs) -> np.ndarray:
    """Companion matrix of a monic polynomial, coefficients descending.

    ``coeffs = [1, a_{k-1}, ..., a_1, a_0]`` encodes
    ``x^k + a_{k-1} x^{k-1} + ... + a_0``; the returned k x k matrix has
    this as its characteristic polynomial.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.shape[0] < 2:
        raise NotMonicError("need a monic polynomial of degree >= 1")
    if c[0] != 1.0:
        raise NotMonicError(f"leading coefficient is {c[0]}, expected 1")
    k = c.shape[0] - 1
    mat = np.zeros((k, k), dtype=complex)
    if k > 1:
        mat[1:, :-1] = np.eye(k - 1)
    mat[:, -1] = -c[:0:-1]  # ascending a_0 .. a_{k-1}
    return mat


def grid_multiplication_matrices(univariate_coeffs) -> MultiplicationFamily:
    """Exactly commuting multiplication matrices of a decoupled system.

    For monic ``p_1(x_1), ..., p_s(x_s)`` the quotient-ring basis is the
    monomial box below the degrees and multiplication by ``x_k`` acts as
    ``I x ... x C_{p_k} x ... x I`` (factor k, matching the vec ordering
    with the last factor's index fastest).
    """
    companions = [companion(c) for c in univariate_coeffs]
    degrees = [c.shape[0] for c in companions]
    mats = []
    for k, comp in enumerate(companions):
        before = int(np.prod(degrees[:k])) if k > 0 else 1
        after = int(np.prod(degrees[k + 1 :])) if k + 1 < len(degrees) else 1
        mats.append(np.kron(np.eye(before), np.kron(comp, np.eye(after))))
    return MultiplicationFamily(mats, basis_note="monomial box of a decoupled system")


def roots_from_multiplication_matrices(
    fam: MultiplicationFamily, mode: str = RQ2, seed: int = 0
) -> tuple[np.ndarray, JointEigenResult]:
    """All m root candidates in C^s, with the solver's diagnostics."""
    result = rjea(fam.as_commuting_family(), mode, seed)
    return result.tuples, result


def roots_via_schur_baseline(
    fam: MultiplicationFamily, variant: str = FIRST_MATRIX, seed: int = 0
) -> np.ndarray:
    """Baseline roots from the Schur diagonal of one matrix.

    Triangularizes the first matrix (or a random combination) unitarily and
    reads the tuples off the diagonals of the rotated family, in Schur
    order, with no clustering or reordering.
    """
    if variant == FIRST_MATRIX:
        m = fam.matrices[0]
    elif variant == RANDOM_COMBINATION:
        mu = sample_unit_sphere(fam.s, seed)
        m = linear_combination(fam.as_commuting_family(), mu)
    else:
        raise ValueError("variant must be 'first' or 'random'")
    _, u = la.schur(m, output="complex")
    roots = np.empty((fam.m, fam.s), dtype=complex)
    for k, mat in enumerate(fam.matrices):
        roots[:, k] = np.diag(u.conj().T @ mat @ u)
    return roots


def _eval_terms(terms, point, var, s):
    # recursive sparse Horner: factor on the exponent of `var`
    if var == s:
        return sum(c for c, _ in terms)
    by_exp: dict[int, list] = {}
    for c, exps in terms:
        by_exp.setdefault(exps[var], []).append((c, exps))
    exps_desc = sorted(by_exp, reverse=True)
    acc = 0.0 + 0.0j
    prev = None
    for e in exps_desc:
        inner = _eval_terms(by_exp[e], point, var + 1, s)
        if prev is None:
            acc = inner
        else:
            acc = acc * point[var] ** (prev - e) + inner
        prev = e
    return acc * point[var] ** prev


def evaluate_system_residual(system: PolynomialSystem, root) -> float:
    """Scale-invariant residual of a candidate root.

    ``max_i |p_i(root)| / (1 + sum |coeffs of p_i| * max(1, ||root||_inf)^{deg p_i})``,
    with each polynomial evaluated by nested Horner recursion per variable.
    """
    point = np.asarray(root, dtype=complex)
    grow = max(1.0, float(np.max(np.abs(point)))) if point.size else 1.0
    worst = 0.0
    for poly in system.polynomials:
        if not poly:
            continue
        value = _eval_terms(list(poly), point, 0, system.s)
        degree = max(sum(exps) for _, exps in poly)
        scale = 1.0 + sum(abs(c) for c, _ in poly) * grow**degree
        worst = max(worst, abs(value) / scale)
    return worst


def example8_problem(sigma: float, seed: int = 0) -> MepProblem:
    """Two-parameter linearization of a near-double-root quadratic system.

    The system ``p_i(x_1, x_2) = (x_i - 1/3)^2 + sigma * sum_j q_ij (x_j - 1/3)``
    (``q`` a random real orthogonal 2 x 2) has a root at (1/3, 1/3) whose
    conditioning as an eigenvalue of its linearization grows like
    ``sigma^{-2}`` as the coupling shrinks.  Each polynomial gets the 2 x 2
    determinantal representation

        det [[u_i, -1], [sigma (q_i1 u + q_i2 v), u_i]] = p_i,

    with ``u = x_1 - 1/3``, ``v = x_2 - 1/3`` and ``u_i`` the diagonal
    variable of equation ``i``.  The off-diagonal -1 keeps the coalescing
    root defective in the ``sigma -> 0`` limit, which is what drives the
    ill-conditioning.  Each block is then perturbed at relative unit
    roundoff, modeling the finite-precision output of the upstream
    representation-construction pipeline; without it the synthetic blocks
    would represent the system exactly and the root would come out at
    machine precision regardless of conditioning.
    """
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    rng = np.random.default_rng(seed)
    q, r = la.qr(rng.standard_normal((2, 2)))
    q = q * np.sign(np.diag(r))
    third = 1.0 / 3.0
    rows = []
    for i in range(2):
        qa, qb = q[i, 0], q[i, 1]
        a0 = np.array([[-third, -1.0], [-sigma * (qa + qb) * third, -third]])
        if i == 0:
            a1 = -np.array([[1.0, 0.0], [sigma * qa, 1.0]])
            a2 = -np.array([[0.0, 0.0], [sigma * qb, 0.0]])
        else:
            a1 = -np.array([[0.0, 0.0], [sigma * qa, 0.0]])
            a2 = -np.array([[1.0, 0.0], [sigma * qb, 1.0]])
        row = []
        for m in (a0, a1, a2):
            norm = np.linalg.norm(m)
            noise = rng.standard_normal((2, 2))
            row.append(m + norm * dense.UNIT_ROUNDOFF * noise if norm else m)
        rows.append(row)
    return MepProblem(rows)


def example8_polynomial_system(sigma: float, seed: int = 0) -> PolynomialSystem:
    """The polynomial system matching ``example8_problem`` for the same seed."""
    rng = np.random.default_rng(seed)
    q, r = la.qr(rng.standard_normal((2, 2)))
    q = q * np.sign(np.diag(r))
    third = 1.0 / 3.0
    polys = []
    for i in range(2):
        terms = {
            (2 if i == 0 else 0, 0 if i == 0 else 2): 1.0 + 0j,
        }
        # expand (x_i - 1/3)^2 cross terms
        key_lin_i = (1, 0) if i == 0 else (0, 1)
        terms[key_lin_i] = terms.get(key_lin_i, 0.0) - 2.0 * third
        terms[(0, 0)] = terms.get((0, 0), 0.0) + third**2
        for j in range(2):
            key = (1, 0) if j == 0 else (0, 1)
            terms[key] = terms.get(key, 0.0) + sigma * q[i, j]
            terms[(0, 0)] = terms.get((0, 0), 0.0) - sigma * q[i, j] * third
        polys.append(tuple((complex(c), e) for e, c in sorted(terms.items())))
    return PolynomialSystem(2, tuple(polys))


def sigma_study(
    problem_builder,
    sigmas,
    trials: int,
    seed: int = 0,
    target=(1.0 / 3.0, 1.0 / 3.0),
) -> list[dict]:
    """Median distance of the tracked root across shrinking coupling strengths.

    ``problem_builder(sigma, instance_seed)`` must return a regular
    two-parameter problem per trial; each is solved with two-sided
    quotients and the distance from the nearest eigenvalue tuple to the
    target root is recorded.
    """
    target = np.asarray(target, dtype=complex)
    rows = []
    for j, sigma in enumerate(sigmas):
        sigma_seed = derive_seed(seed, j)
        errors = np.empty(trials)
        for t in range(trials):
            problem = problem_builder(sigma, derive_seed(sigma_seed, 2 * t))
            sol = solve_mep(problem, RQ2, seed=derive_seed(sigma_seed, 2 * t + 1))
            dists = np.linalg.norm(sol.eigenvalues - target, axis=1)
            errors[t] = float(np.min(dists))
        rows.append({"sigma": float(sigma), "median_error": float(np.median(errors)), "errors": errors})
    return rows
