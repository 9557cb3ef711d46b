"""Acceptance suite: one test per release criterion, one printed line each.

The PASS/FAIL lines are written past pytest's output capture, so
``pytest tests/test_acceptance.py -v`` shows them alongside the verdicts.
Tolerances are pinned here; quantitative targets tied to randomized
reference data carry a factor-10 band, while orderings, probabilities and
slopes are exact gates.
"""

import contextlib
import io
import os
import time

import numpy as np
import pytest
import scipy.linalg as la

from jointeig import dense
from jointeig import io as jio
from jointeig.cli import cli_main
from jointeig.mep import (
    MepProblem,
    delta_matvec,
    operator_determinant,
    right_definite_solve,
    solve_mep,
    three_param_random_problem,
)
from jointeig.perturbation import (
    block_diagonalize,
    predict_perturbed_eigvectors,
    subspace_distance,
)
from jointeig.polyroots import (
    PolynomialSystem,
    evaluate_system_residual,
    grid_multiplication_matrices,
    roots_from_multiplication_matrices,
    roots_via_schur_baseline,
)
from jointeig.rjea import CommutingFamily, linear_combination, rjea, sample_unit_sphere
from jointeig.synth import (
    FamilySpec,
    defective_scaling_experiment,
    empirical_dmu_probability,
    example1_spec,
    example2_spec,
    example5_spec,
    fit_loglog_slope,
    gaussian_eigvec_condition_experiment,
    make_family,
    match_eigenvalues,
    rq1_failure_probability_experiment,
    run_trials,
)


@pytest.fixture
def report(capfd):
    """One PASS/FAIL line per criterion, written past pytest's capture."""

    def _report(number, name, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        with capfd.disabled():
            print(f"criterion {number:02d} ({name}): {status}  {detail}")
        assert ok, f"criterion {number:02d} ({name}) failed: {detail}"

    return _report


def test_criterion_01_exactness_gate(report):
    start = time.time()
    fam = CommutingFamily([np.diag([1.0, 2.0, -3.0]), np.diag([4.0, -5.0, 6.0])])
    truth = np.array([[1.0, 4.0], [2.0, -5.0], [-3.0, 6.0]])
    worst = 0.0
    for mode in ("RQ1", "RQ2"):
        res = rjea(fam, mode, seed=3)
        perm = match_eigenvalues(res.tuples, truth)
        worst = max(worst, float(np.max(np.abs(res.tuples[perm] - truth))))
    elapsed = time.time() - start
    report(1, "exactness-gate", worst <= 1e-13 and elapsed < 1.0,
           f"max abs error {worst:.2e}, {elapsed:.2f}s")


def test_criterion_02_table1_rerun(report):
    start = time.time()
    targets = {0.0: 1.8e-14, 1e-14: 3.4e-14, 1e-12: 1.3e-12, 1e-10: 1.3e-10}
    reports = run_trials(
        example1_spec(), tuple(targets), (0,), trials=1000, base_seed=101, with_bounds=False
    )
    ok, details = True, []
    medians = {}
    for rep in reports:
        med_b = rep.median_rq2(0)
        medians[rep.epsilon] = med_b
        target = targets[rep.epsilon]
        ok &= target / 10.0 <= med_b <= target * 10.0
        ok &= rep.prob_b_lt_5a(0) >= 0.95
        details.append(f"eps={rep.epsilon:.0e}: b={med_b:.2e} P5a={rep.prob_b_lt_5a(0):.3f}")
    eps_pos = [e for e in targets if e > 0]
    slope = fit_loglog_slope(eps_pos, [medians[e] for e in eps_pos])
    ok &= 0.8 <= slope <= 1.2
    elapsed = time.time() - start
    ok &= elapsed < 120.0
    report(2, "table1-rerun", ok, "; ".join(details) + f"; slope={slope:.2f}; {elapsed:.1f}s")


def test_criterion_03_table2_structure(report):
    start = time.time()
    reports = run_trials(
        example2_spec(), (1e-12, 1e-10, 1e-8), (0,), trials=1000, base_seed=202, with_bounds=False
    )
    ok, details = True, []
    for rep in reports:
        ratio = rep.median_rq1(0) / rep.median_rq2(0)
        prob = rep.prob_b_lt_a(0)
        ok &= ratio >= 1e2
        ok &= abs(prob - 1.0) <= 0.01
        details.append(f"eps={rep.epsilon:.0e}: a/b={ratio:.0f} P={prob:.4f}")
    elapsed = time.time() - start
    ok &= elapsed < 120.0
    report(3, "table2-structure", ok, "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_04_separation_tail(report):
    start = time.time()
    _, truth, _ = make_family(example1_spec())
    rows = empirical_dmu_probability(truth, 0, (3.0, 10.0, 30.0), samples=100_000, seed=404)
    ok, details = True, []
    for row in rows:
        ok &= row["empirical"] <= row["bound"] + 3 * row["stderr"]
        details.append(f"R={row['R']:.0f}: {row['empirical']:.4f}<={row['bound']:.4f}+3s")
    elapsed = time.time() - start
    ok &= elapsed < 60.0
    report(4, "separation-tail", ok, "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_05_rq1_tail_slope(report):
    start = time.time()
    r_values = (3.0, 10.0, 30.0, 100.0)
    tables = {}
    # same base seed for both levels: the perturbation direction and the
    # combination stream are shared, isolating the effect of the noise level
    for eps in (1e-12, 1e-9):
        tables[eps] = rq1_failure_probability_experiment(
            example1_spec(), eps, r_values, trials=20_000, seed=505
        )
    ok, details = True, []
    for eps, table in tables.items():
        rs = np.array([row["R"] for row in table["rows"]])
        emp = np.array([row["empirical"] for row in table["rows"]])
        for row in table["rows"]:
            ok &= row["empirical"] <= row["bound"]
        slope = fit_loglog_slope(rs[emp > 0], emp[emp > 0])
        ok &= -2.5 <= slope <= -1.5
        details.append(f"eps={eps:.0e}: slope={slope:.2f}")
    for i in range(len(r_values)):
        r1 = tables[1e-12]["rows"][i]
        r2 = tables[1e-9]["rows"][i]
        gap = abs(r1["empirical"] - r2["empirical"])
        ok &= gap <= 3 * np.sqrt(r1["stderr"] ** 2 + r2["stderr"] ** 2) + 1e-12
    elapsed = time.time() - start
    ok &= elapsed < 300.0
    report(5, "rq1-tail-slope", ok, "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_06_gaussian_eigvec_tail(report):
    start = time.time()
    p = 8
    result = gaussian_eigvec_condition_experiment(p, 10_000, t=1.0, big_r=100.0 * p**1.5, seed=606)
    ok = result["empirical_tail"] <= result["bound"] + 3 * result["stderr"]
    elapsed = time.time() - start
    ok &= elapsed < 120.0
    report(6, "gaussian-eigvec-tail", ok,
           f"tail={result['empirical_tail']:.2e} bound={result['bound']:.2e}; {elapsed:.1f}s")


def test_criterion_07_defective_scaling(report):
    start = time.time()
    result = defective_scaling_experiment(
        example5_spec(), (1e-12, 1e-9, 1e-6), trials=200, base_seed=707
    )
    ok = 0.2 <= result["slope_defective"] <= 0.5
    ok &= 0.8 <= result["slope_simple"] <= 1.2
    elapsed = time.time() - start
    ok &= elapsed < 60.0
    report(7, "defective-scaling", ok,
           f"triple={result['slope_defective']:.2f} simple={result['slope_simple']:.2f}; {elapsed:.1f}s")


def test_criterion_08_perturbation_predictor(report):
    start = time.time()
    spec = FamilySpec(
        n=6,
        d=2,
        diagonals=(
            np.array([1.0, 1.02, 1.9, 2.5, 3.2, 4.0]),
            np.array([2.0, 2.03, 3.0, 0.5, 2.6, 1.3]),
        ),
        kappa=30.0,
        seed=17,
    )
    fam, truth, _ = make_family(spec)
    bd = block_diagonalize(fam, truth[0], 1e-8, seed=99)
    mu = sample_unit_sphere(2, 123)
    a_mu = linear_combination(fam, mu)
    lam_mu = mu.mu @ truth[0]
    rng = np.random.default_rng(55)
    noise = [rng.standard_normal((6, 6)) for _ in range(2)]
    noise = [e / np.linalg.norm(e) / np.sqrt(2.0) for e in noise]
    e_mu = sum(m * e for m, e in zip(mu.mu, noise))
    eps_grid = (1e-6, 1e-7, 1e-8)
    dists = []
    for eps in eps_grid:
        x1_pred, _ = predict_perturbed_eigvectors(a_mu, e_mu, eps, bd, lam_mu)
        dec = dense.eig(a_mu + eps * e_mu)
        idx = int(np.argmin(np.abs(dec.values - lam_mu)))
        dists.append(subspace_distance(x1_pred, dec.right_vectors[:, [idx]]))
    slope = fit_loglog_slope(eps_grid, dists)
    elapsed = time.time() - start
    ok = 1.7 <= slope <= 2.3 and elapsed < 10.0
    report(8, "perturbation-predictor", ok, f"slope={slope:.2f}; {elapsed:.1f}s")


def test_criterion_09_mep_correctness(report):
    start = time.time()
    ok, details = True, []
    # (a) matrix-free vs explicit operator determinants
    rng = np.random.default_rng(8)
    rows = [
        [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4)]
        for _ in range(3)
    ]
    prob3 = MepProblem(rows)
    worst = 0.0
    for column in range(4):
        explicit = operator_determinant(prob3, column)
        for _ in range(20):
            z = dense.complex_gaussian(8, rng)
            expected = explicit @ z
            got = delta_matvec(prob3, column, z)
            worst = max(worst, np.linalg.norm(got - expected) / np.linalg.norm(expected))
    ok &= worst <= 1e-12
    details.append(f"matvec={worst:.1e}")
    # (b) scalar problem against the linear-system oracle
    scalar = MepProblem(
        [
            [np.array([[5.0]]), np.array([[1.0]]), np.array([[2.0]])],
            [np.array([[4.0]]), np.array([[1.0]]), np.array([[-1.0]])],
        ]
    )
    sol = solve_mep(scalar, "RQ2", seed=1)
    oracle = la.solve(np.array([[1.0, 2.0], [1.0, -1.0]]), np.array([5.0, 4.0]))
    err_b = np.max(np.abs(sol.eigenvalues[0].real - oracle))
    ok &= err_b <= 1e-12
    details.append(f"scalar={err_b:.1e}")
    # (c) residual certificates on a random regular problem
    prob2 = MepProblem([[rng.standard_normal((2, 2)) for _ in range(3)] for _ in range(2)])
    sol2 = solve_mep(prob2, "RQ2", seed=9)
    ok &= sol2.count == 4 and sol2.residuals.max() <= 1e-8
    details.append(f"residual={sol2.residuals.max():.1e}")
    # (d) strategy agreement
    s_p = solve_mep(prob2, "RQ2", seed=10, strategy="pencil")
    s_e = solve_mep(prob2, "RQ2", seed=10, strategy="explicit")
    perm = match_eigenvalues(s_e.eigenvalues, s_p.eigenvalues)
    gap = np.max(np.linalg.norm(s_p.eigenvalues - s_e.eigenvalues[perm], axis=1))
    ok &= gap <= 1e-8
    details.append(f"strategies={gap:.1e}")
    # (e) definite path against the two-sided path
    rng2 = np.random.default_rng(23)

    def sym(n):
        m = rng2.standard_normal((n, n))
        return 0.5 * (m + m.T)

    definite = MepProblem(
        [
            [sym(3), np.eye(3) + 0.1 * sym(3), 0.1 * sym(3)],
            [sym(2), 0.1 * sym(2), np.eye(2) + 0.1 * sym(2)],
        ]
    )
    rd = right_definite_solve(definite, seed=11)
    rq = solve_mep(definite, "RQ2", seed=11)
    perm = match_eigenvalues(rq.eigenvalues, rd.eigenvalues)
    gap_rd = np.max(np.linalg.norm(rd.eigenvalues - rq.eigenvalues[perm], axis=1))
    ok &= gap_rd <= 1e-9
    details.append(f"definite={gap_rd:.1e}")
    elapsed = time.time() - start
    ok &= elapsed < 30.0
    report(9, "mep-correctness", ok, "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_10_three_parameter_robustness(report):
    start = time.time()
    ok, details = True, []
    for n in (4, 6, 8):
        worst = 0.0
        for instance in range(5):
            prob = three_param_random_problem(n, seed=1000 * n + instance)
            sol = solve_mep(prob, "RQ2", seed=77 + instance)
            ok &= sol.count == n**3
            worst = max(worst, float(sol.residuals.max()))
        ok &= worst <= 1e-8
        details.append(f"n={n}: residual={worst:.1e}")
    elapsed = time.time() - start
    ok &= elapsed < 180.0
    report(10, "three-parameter-robustness", ok, "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_11_polyroots_grid(report):
    start = time.time()
    fam = grid_multiplication_matrices([[1.0, -3.0, 2.0], [1.0, 2.5, -1.5]])
    truth = np.array([[1.0, -3.0], [1.0, 0.5], [2.0, -3.0], [2.0, 0.5]])
    roots, _ = roots_from_multiplication_matrices(fam, "RQ2", seed=3)
    perm = match_eigenvalues(roots, truth)
    err_roots = np.max(np.linalg.norm(roots[perm] - truth, axis=1))
    # the first multiplication matrix has double eigenvalues on a grid, so
    # the plain-Schur baseline is only well defined for the random variant
    baseline = roots_via_schur_baseline(fam, "random", seed=5)
    perm_b = match_eigenvalues(baseline, roots)
    gap = np.max(np.linalg.norm(roots - baseline[perm_b], axis=1))
    system = PolynomialSystem.from_grid([[1.0, -3.0, 2.0], [1.0, 2.5, -1.5]])
    residual = max(evaluate_system_residual(system, root) for root in roots)
    elapsed = time.time() - start
    ok = err_roots <= 1e-10 and gap <= 1e-6 and residual <= 1e-8 and elapsed < 5.0
    report(11, "polyroots-grid", ok,
           f"roots={err_roots:.1e} baseline-gap={gap:.1e} residual={residual:.1e}; {elapsed:.1f}s")


def test_criterion_12_cli_determinism(tmp_path, report):
    start = time.time()

    def run(argv):
        buffer = io.StringIO()
        with contextlib.redirect_stdout(buffer):
            code = cli_main(argv)
        return code, buffer.getvalue()

    def tree(root):
        found = {}
        for name in sorted(os.listdir(root)):
            with open(os.path.join(root, name), "rb") as fh:
                found[name] = fh.read()
        return found

    family, _, _ = make_family(example1_spec())
    fam_path = str(tmp_path / "family.json")
    jio.write_family(family, fam_path)
    prob = three_param_random_problem(3, seed=3)
    mep_path = str(tmp_path / "problem.json")
    jio.write_mep(prob, mep_path)

    invocations = [
        ["solve-joint", "--mode", "rq2", "--seed", "7", fam_path],
        ["solve-mep", "--seed", "5", "--strategy", "pencil", mep_path],
        ["experiment", "table1", "--trials", "25", "--seed", "1"],
        ["experiment", "sigma-study", "--trials", "10", "--seed", "2"],
    ]
    ok = True
    for i, argv in enumerate(invocations):
        out_a = str(tmp_path / f"a{i}")
        out_b = str(tmp_path / f"b{i}")
        code_a, stdout_a = run(argv + ["--out", out_a])
        code_b, stdout_b = run(argv + ["--out", out_b])
        ok &= code_a == 0 and code_b == 0
        ok &= stdout_a == stdout_b
        ok &= tree(out_a) == tree(out_b)
    elapsed = time.time() - start
    report(12, "cli-determinism", ok, f"{len(invocations)} invocations x2; {elapsed:.1f}s")
