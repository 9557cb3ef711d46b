"""Synthetic commuting-family generation and the Monte-Carlo experiment lab.

Families with known joint eigenvalues are built as ``A_k = X D_k X^{-1}``
from prescribed diagonals and a random basis ``X`` with unit columns and a
prescribed condition number.  Noise is added as ``A_k + (eps/sqrt(d)) E_k``
with ``||E_k||_F = 1`` so the total perturbation has Frobenius norm ``eps``.
The harness reruns the randomized solver over many combinations and
aggregates matched errors, bound evaluations, and empirical tail
probabilities for the separation and failure bounds.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.optimize import linear_sum_assignment

from . import dense
from .errors import CountMismatchError, NoConvergenceError, NotAnEigenvalueError, NotSemisimpleError
from .perturbation import block_diagonalize, separation_d_mu, separation_d_mu_samples
from .rjea import RQ1, CommutingFamily, linear_combination, sample_unit_sphere
from .rjea import rjea as _rjea
from .seeds import derive_seed, thread_count

PLAIN = "plain"
BLOCKED_X = "blocked"
JORDAN = "jordan"
_STRUCTURES = (PLAIN, BLOCKED_X, JORDAN)


@dataclass(frozen=True)
class FamilySpec:
    """Recipe for a synthetic family: diagonals, basis conditioning, structure."""

    n: int
    d: int
    diagonals: tuple
    kappa: float
    structure: str = PLAIN
    seed: int = 0
    blocks: tuple | None = None  # upper-triangular blocks for the jordan structure

    def __post_init__(self):
        if self.structure not in _STRUCTURES:
            raise ValueError(f"structure must be one of {_STRUCTURES}")
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        if len(self.diagonals) != self.d:
            raise ValueError("need one diagonal per family member")
        for diag in self.diagonals:
            if np.asarray(diag).shape != (self.n,):
                raise ValueError("each diagonal must have length n")
        if self.structure == JORDAN and self.blocks is None:
            raise ValueError("jordan structure requires explicit blocks")


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed real orthogonal matrix (QR of a Gaussian, sign-fixed)."""
    q, r = la.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def conditioned_basis(n: int, kappa: float, seed: int) -> np.ndarray:
    """Random real basis with unit columns and 2-norm condition ``kappa``.

    Generates ``Q1 diag(1, t^{1/(n-1)}, ..., t) Q2`` for random orthogonal
    ``Q1, Q2``, normalizes the columns, and adjusts ``t`` by bisection on
    ``log t`` until the normalized matrix has condition within 1% of
    ``kappa``.  The map from ``t`` to the resulting condition number is
    empirically monotone on the bracket.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    rng = np.random.default_rng(seed)
    q1 = random_orthogonal(n, rng)
    q2 = random_orthogonal(n, rng)
    if kappa == 1.0:
        return q1 @ q2

    exponents = np.arange(n) / (n - 1)

    def build(t: float) -> np.ndarray:
        return dense.normalize_columns((q1 * t**exponents) @ q2)

    lo, hi = np.log(kappa), np.log(1e3 * kappa)
    # widen downward if normalization overshoots at the nominal bracket edge
    for _ in range(8):
        if dense.cond2(build(np.exp(lo))) <= kappa:
            break
        lo -= np.log(10.0)
    else:
        raise NoConvergenceError("could not bracket the target condition number")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        x = build(np.exp(mid))
        c = dense.cond2(x)
        if abs(c - kappa) <= 0.01 * kappa:
            return x
        if c < kappa:
            lo = mid
        else:
            hi = mid
    raise NoConvergenceError("condition-number search exceeded 100 iterations")


def make_family(spec: FamilySpec) -> tuple[CommutingFamily, np.ndarray, np.ndarray]:
    """Build the family, its ground-truth tuples, and the basis used.

    ``kappa == 1`` with the plain structure uses the identity basis, so the
    family is exactly the diagonals.  The blocked structure reproduces a
    basis ``P blockdiag(I_2, Z)`` with Gaussian ``P`` and a conditioned
    ``(n-2) x (n-2)`` block ``Z``, which makes the first two joint
    eigenvalues far better conditioned than the rest.
    """
    ground_truth = np.stack(
        [np.asarray(diag, dtype=complex) for diag in spec.diagonals], axis=1
    )
    if spec.structure == PLAIN and spec.kappa == 1.0:
        x = np.eye(spec.n)
    elif spec.structure == BLOCKED_X:
        rng = np.random.default_rng(spec.seed)
        p = rng.standard_normal((spec.n, spec.n))
        z = conditioned_basis(spec.n - 2, spec.kappa, derive_seed(spec.seed, 1))
        x = p @ la.block_diag(np.eye(2), z)
    else:
        x = conditioned_basis(spec.n, spec.kappa, spec.seed)

    x_inv = la.inv(x)
    if spec.structure == JORDAN:
        mats = [x @ np.asarray(b, dtype=float) @ x_inv for b in spec.blocks]
    else:
        mats = [(x * np.asarray(diag)) @ x_inv for diag in spec.diagonals]
    return CommutingFamily(mats), ground_truth, x


def add_noise(family: CommutingFamily, epsilon: float, seed: int) -> CommutingFamily:
    """Perturb each member by ``(eps/sqrt(d)) E_k`` with unit-Frobenius ``E_k``.

    The total perturbation has Frobenius norm exactly ``eps``; the noise is
    real when the family is real.  ``eps == 0`` returns the family unchanged.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if epsilon == 0.0:
        return family
    rng = np.random.default_rng(seed)
    real = family.is_real
    scale = epsilon / np.sqrt(family.d)
    noisy = []
    for m in family.matrices:
        if real:
            e = rng.standard_normal((family.n, family.n))
        else:
            e = dense.complex_gaussian((family.n, family.n), rng)
        e /= np.linalg.norm(e)
        noisy.append(m + scale * e)
    return CommutingFamily(noisy)


def match_eigenvalues(computed, reference) -> np.ndarray:
    """Minimum-cost matching of computed to reference tuples.

    Returns ``perm`` with ``perm[i]`` the index of the computed tuple
    assigned to ``reference[i]``, under Euclidean tuple distance.
    """
    comp = np.asarray(computed, dtype=complex)
    ref = np.asarray(reference, dtype=complex)
    if comp.ndim == 1:
        comp = comp[:, None]
    if ref.ndim == 1:
        ref = ref[:, None]
    if comp.shape != ref.shape:
        raise CountMismatchError(f"{comp.shape[0]} computed vs {ref.shape[0]} reference tuples")
    cost = np.linalg.norm(ref[:, None, :] - comp[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(ref.shape[0], dtype=int)
    perm[rows] = cols
    return perm


@dataclass
class ExperimentReport:
    """Per-noise-level record of matched errors and bound evaluations.

    Arrays are indexed by tracked ground-truth eigenvalue index; each entry
    has one value per trial.  ``errors_rq1``/``errors_rq2`` are the matched
    Euclidean errors (``a`` and ``b``); probabilities compare them per
    trial.  ``cdf_samples`` are the same errors sorted, ready for plotting.
    """

    epsilon: float
    epsilon_effective: float
    trials: int
    tracked: tuple
    base_seed: int
    delta: float | None = None
    errors_rq1: dict = field(default_factory=dict)
    errors_rq2: dict = field(default_factory=dict)
    bounds_rq1: dict = field(default_factory=dict)
    bounds_rq2: dict = field(default_factory=dict)

    def median_rq1(self, idx: int) -> float:
        return float(np.median(self.errors_rq1[idx]))

    def median_rq2(self, idx: int) -> float:
        return float(np.median(self.errors_rq2[idx]))

    def median_bound_rq1(self, idx: int) -> float:
        return float(np.median(self.bounds_rq1[idx])) if self.bounds_rq1 else np.nan

    def median_bound_rq2(self, idx: int) -> float:
        return float(np.median(self.bounds_rq2[idx])) if self.bounds_rq2 else np.nan

    def prob_b_lt_a(self, idx: int) -> float:
        return float(np.mean(self.errors_rq2[idx] < self.errors_rq1[idx]))

    def prob_b_lt_5a(self, idx: int) -> float:
        return float(np.mean(self.errors_rq2[idx] < 5.0 * self.errors_rq1[idx]))

    def cdf_samples(self, idx: int, mode: str) -> np.ndarray:
        errs = self.errors_rq2[idx] if mode == "RQ2" else self.errors_rq1[idx]
        return np.sort(errs)

    def to_dict(self) -> dict:
        out = {
            "epsilon": self.epsilon,
            "epsilon_effective": self.epsilon_effective,
            "trials": self.trials,
            "tracked": list(self.tracked),
            "base_seed": self.base_seed,
            "per_eigenvalue": {},
        }
        if self.delta is not None:
            out["delta"] = self.delta
        for idx in self.tracked:
            entry = {
                "median_rq1": self.median_rq1(idx),
                "median_rq2": self.median_rq2(idx),
                "prob_b_lt_a": self.prob_b_lt_a(idx),
                "prob_b_lt_5a": self.prob_b_lt_5a(idx),
                "errors_rq1_sorted": sorted(self.errors_rq1[idx].tolist()),
                "errors_rq2_sorted": sorted(self.errors_rq2[idx].tolist()),
            }
            if self.bounds_rq1:
                entry["median_bound_rq1"] = self.median_bound_rq1(idx)
                entry["median_bound_rq2"] = self.median_bound_rq2(idx)
            out["per_eigenvalue"][str(idx)] = entry
        return out


def roundoff_level(family: CommutingFamily) -> float:
    """Noise floor ``sqrt(sum_k ||A_k||_2^2) * u`` used in place of eps = 0."""
    return float(
        np.sqrt(sum(np.linalg.norm(m, 2) ** 2 for m in family.matrices))
        * dense.UNIT_ROUNDOFF
    )


def _map_trials(worker, trials: int):
    workers = thread_count()
    if workers <= 1:
        return [worker(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, range(trials)))


def _block_diag_with_retry(family, lam, tol, seed, attempts=5):
    last = None
    for k in range(attempts):
        try:
            return block_diagonalize(family, lam, tol, derive_seed(seed, k))
        except (NotSemisimpleError, NotAnEigenvalueError) as exc:
            last = exc
    raise last


def run_trials(
    spec: FamilySpec,
    epsilons,
    tracked,
    trials: int,
    base_seed: int = 0,
    fresh_noise: bool = False,
    with_bounds: bool = True,
    delta: float | None = None,
) -> list[ExperimentReport]:
    """Monte-Carlo harness: one report per noise level.

    Per trial a fresh combination is sampled and both quotient modes are
    evaluated on the same eigendecomposition; outputs are matched to the
    ground truth by minimum-cost assignment.  Noise is drawn once per noise
    level and held fixed while the combination varies (so the error
    distribution reflects the combination randomness); ``fresh_noise``
    redraws it per trial instead.  With ``with_bounds`` the first-order
    bounds are evaluated per trial, substituting the roundoff level for
    ``eps == 0``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tracked = tuple(int(i) for i in tracked)
    family0, ground_truth, _ = make_family(spec)
    n = family0.n
    eps0 = roundoff_level(family0)

    bd_info = {}
    if with_bounds:
        for idx in tracked:
            bd = _block_diag_with_retry(
                family0, ground_truth[idx], 1e-8, derive_seed(base_seed, 900 + idx)
            )
            x2y2 = float(np.linalg.norm(bd.x2, 2) * np.linalg.norm(bd.y2, 2))
            bd_info[idx] = x2y2

    reports = []
    for j, eps in enumerate(epsilons):
        eps_seed = derive_seed(base_seed, j)
        eps_eff = eps if eps > 0 else eps0
        noisy = None if fresh_noise else add_noise(family0, eps, derive_seed(eps_seed, 0))

        def one_trial(t, _eps=eps, _eps_seed=eps_seed, _noisy=noisy):
            fam = (
                add_noise(family0, _eps, derive_seed(_eps_seed, 500_000 + t))
                if fresh_noise
                else _noisy
            )
            mu = sample_unit_sphere(fam.d, derive_seed(_eps_seed, 1 + t))
            a_mu = linear_combination(fam, mu)
            decomp = dense.eig(a_mu)
            order = np.lexsort((decomp.values.imag, decomp.values.real))
            x = decomp.right_vectors[:, order]
            y = decomp.left_vectors[:, order]
            rq1 = np.stack(
                [np.einsum("ij,ij->j", x.conj(), m @ x) for m in fam.matrices], axis=1
            )
            rq2 = np.stack(
                [np.einsum("ij,ij->j", y.conj(), m @ x) for m in fam.matrices], axis=1
            )
            left_norms = np.linalg.norm(y, axis=0)
            # one assignment per trial: both readouts come from the same
            # eigenpair, so comparing them only makes sense at equal indices
            # (separate matchings would mix cluster members)
            perm = match_eigenvalues(rq1 if decomp.defective else rq2, ground_truth)
            rec = {}
            for idx in tracked:
                a_err = float(np.linalg.norm(rq1[perm[idx]] - ground_truth[idx]))
                b_err = float(np.linalg.norm(rq2[perm[idx]] - ground_truth[idx]))
                row = (a_err, b_err)
                if with_bounds:
                    d_mu = separation_d_mu(ground_truth, idx, mu)
                    bound1 = (1.0 + np.sqrt(fam.d) * bd_info[idx] / d_mu) * eps_eff
                    bound2 = float(left_norms[perm[idx]]) * eps_eff
                    row = (a_err, b_err, float(bound1), float(bound2))
                rec[idx] = row
            return rec

        results = _map_trials(one_trial, trials)
        report = ExperimentReport(
            epsilon=float(eps),
            epsilon_effective=float(eps_eff),
            trials=trials,
            tracked=tracked,
            base_seed=base_seed,
            delta=delta,
        )
        for idx in tracked:
            rows = [r[idx] for r in results]
            report.errors_rq1[idx] = np.array([r[0] for r in rows])
            report.errors_rq2[idx] = np.array([r[1] for r in rows])
            if with_bounds:
                report.bounds_rq1[idx] = np.array([r[2] for r in rows])
                report.bounds_rq2[idx] = np.array([r[3] for r in rows])
        reports.append(report)
    return reports


def fit_loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log ys`` against ``log xs``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = (xs > 0) & (ys > 0)
    if keep.sum() < 2:
        raise ValueError("need at least two positive points for a slope fit")
    return float(np.polyfit(np.log10(xs[keep]), np.log10(ys[keep]), 1)[0])


def defective_scaling_experiment(
    spec: FamilySpec,
    epsilons,
    trials: int,
    base_seed: int = 0,
    defective_index: int = 0,
    simple_index: int = 3,
) -> dict:
    """Error-vs-noise slopes for a family with a nondiagonalizable block.

    Returns the medians per noise level and the log-log slopes for the
    tracked defective and simple eigenvalues (zero noise levels are
    excluded from the fit).
    """
    if spec.structure != JORDAN:
        raise ValueError("expected a jordan-structure spec")
    reports = run_trials(
        spec,
        epsilons,
        (defective_index, simple_index),
        trials,
        base_seed,
        with_bounds=False,
    )
    eps = np.array([r.epsilon for r in reports])
    med_def = np.array([r.median_rq2(defective_index) for r in reports])
    med_simple = np.array([r.median_rq2(simple_index) for r in reports])
    keep = eps > 0
    return {
        "epsilons": eps,
        "median_defective": med_def,
        "median_simple": med_simple,
        "slope_defective": fit_loglog_slope(eps[keep], med_def[keep]),
        "slope_simple": fit_loglog_slope(eps[keep], med_simple[keep]),
    }


def empirical_dmu_probability(
    tuples, target_index: int, r_values, samples: int, seed: int = 0
) -> list[dict]:
    """Empirical ``Prob(d(mu) < 1/R)`` against the ``(n-p)(d-1)/R^2`` bound."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    tuples = np.asarray(tuples, dtype=complex)
    n, d = tuples.shape
    target = tuples[target_index]
    dist = np.linalg.norm(tuples - target, axis=1)
    p = int(np.sum(dist <= 1e-14 * max(1.0, float(np.max(np.linalg.norm(tuples, axis=1))))))
    rng = np.random.default_rng(seed)
    g = dense.complex_gaussian((samples, d), rng)
    mus = g / np.linalg.norm(g, axis=1, keepdims=True)
    dvals = separation_d_mu_samples(tuples, target_index, mus)
    rows = []
    for big_r in r_values:
        emp = float(np.mean(dvals < 1.0 / big_r))
        rows.append(
            {
                "R": float(big_r),
                "empirical": emp,
                "bound": (n - p) * (d - 1) / float(big_r) ** 2,
                "stderr": float(np.sqrt(max(emp * (1 - emp), 1.0 / samples) / samples)),
            }
        )
    return rows


def rq1_failure_probability_experiment(
    spec: FamilySpec,
    epsilon: float,
    r_values,
    trials: int,
    seed: int = 0,
    tracked_index: int = 0,
) -> dict:
    """Empirical exceedance ``Prob(||err_RQ1|| > (1+R) eps)`` vs ``12 kappa2(X)/R^2``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    family0, ground_truth, x = make_family(spec)
    kappa_x = dense.cond2(x)
    noisy = add_noise(family0, epsilon, derive_seed(seed, 0))
    target = ground_truth[tracked_index]

    def one_trial(t):
        res = _rjea(noisy, RQ1, derive_seed(seed, 1 + t))
        perm = match_eigenvalues(res.tuples, ground_truth)
        return float(np.linalg.norm(res.tuples[perm[tracked_index]] - target))

    errors = np.array(_map_trials(one_trial, trials))
    rows = []
    for big_r in r_values:
        emp = float(np.mean(errors > (1.0 + big_r) * epsilon))
        rows.append(
            {
                "R": float(big_r),
                "empirical": emp,
                "bound": 12.0 * kappa_x / float(big_r) ** 2,
                "stderr": float(np.sqrt(max(emp * (1 - emp), 1.0 / trials) / trials)),
            }
        )
    return {"epsilon": epsilon, "kappa_x": kappa_x, "rows": rows, "errors": errors}


def gaussian_eigvec_condition_experiment(
    p: int, samples: int, t: float, big_r: float, seed: int = 0
) -> dict:
    """Tail of the eigenvector condition number of scaled complex Gaussians.

    Samples ``p x p`` matrices whose entries have real/imag parts i.i.d.
    ``N(0, 1/(2p))``, eigendecomposes, normalizes the eigenvector columns
    and measures how often the condition number reaches ``R``; defective
    samples count as exceedances.  The comparison bound is
    ``2 exp(-p t^2) + p^3 (2 sqrt(2) + t)^2 / R^2``.
    """
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(2.0 * p)
    exceed = 0
    norms = np.empty(samples)
    conds = np.empty(samples)
    for i in range(samples):
        g = scale * (rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p)))
        norms[i] = np.linalg.norm(g, 2)
        if p == 1:
            conds[i] = 1.0
            continue
        _, x = la.eig(g)
        conds[i] = dense.cond2(dense.normalize_columns(x))
        if not np.isfinite(conds[i]) or conds[i] >= big_r:
            exceed += 1
    empirical = exceed / samples
    bound = 2.0 * np.exp(-p * t**2) + p**3 * (2.0 * np.sqrt(2.0) + t) ** 2 / big_r**2
    return {
        "p": p,
        "t": t,
        "R": big_r,
        "samples": samples,
        "empirical_tail": empirical,
        "bound": float(bound),
        "stderr": float(np.sqrt(max(empirical * (1 - empirical), 1.0 / samples) / samples)),
        "median_norm": float(np.median(norms)),
        "median_cond": float(np.median(conds)),
    }


# ---------------------------------------------------------------------------
# Shipped presets.  The fixed seeds pin the random bases so that reported
# magnitudes are stable from run to run; the blocked-basis seed was chosen
# so that the first joint eigenvalue's condition number lands near 2, far
# below the trailing block's, which is the regime the preset demonstrates.

EX1_SEED = 20240111
EX2_SEED = 99
EX3_SEED = 20240303
EX5_SEED = 20240505

_D1 = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0])
_D2 = np.array([1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 3.0])


def example1_spec(seed: int = EX1_SEED) -> FamilySpec:
    """Seven simple joint eigenvalues on a basis with condition 1e2."""
    return FamilySpec(n=7, d=2, diagonals=(_D1, _D2), kappa=1e2, structure=PLAIN, seed=seed)


def example2_spec(seed: int = EX2_SEED) -> FamilySpec:
    """Same tuples, but a blocked basis: two well-conditioned eigenvalues."""
    return FamilySpec(n=7, d=2, diagonals=(_D1, _D2), kappa=1e4, structure=BLOCKED_X, seed=seed)


def example3_spec(delta: float, seed: int = EX3_SEED) -> FamilySpec:
    """A cluster of three joint eigenvalues at pairwise distance ~delta."""
    d1 = np.array([1.0, 1.0 + delta, 1.0 - delta, 2.0, 2.0, 2.0, 3.0])
    d2 = np.array([1.0, 1.0 - delta, 1.0 + delta, 1.0, 2.0, 3.0, 3.0])
    return FamilySpec(n=7, d=2, diagonals=(d1, d2), kappa=1e4, structure=PLAIN, seed=seed)


def example5_spec(seed: int = EX5_SEED) -> FamilySpec:
    """A triple nondiagonalizable eigenvalue plus three simple ones."""
    b1 = np.diag([1.0, 1.0, 1.0, 2.0, 3.0, 4.0])
    b2 = np.diag([1.0, 1.0, 1.0, 4.0, 3.0, 2.0])
    b1[0, 1] = b1[1, 2] = 1.0
    b2[0, 1] = b2[1, 2] = 1.0
    return FamilySpec(
        n=6,
        d=2,
        diagonals=(np.diag(b1).copy(), np.diag(b2).copy()),
        kappa=10.0,
        structure=JORDAN,
        seed=seed,
        blocks=(b1, b2),
    )
