"""Roots of polynomial systems from multiplication matrices.

For a system with finitely many roots, multiplication by each variable on
the quotient ring gives a commuting family whose joint eigenvalues are the
roots.  This demo extracts roots with the randomized solver, compares the
plain Schur-diagonal baseline, and reruns the shrinking-coupling study
where the tracked root's eigenvalue conditioning degrades.
"""

import numpy as np

from jointeig.polyroots import (
    PolynomialSystem,
    evaluate_system_residual,
    example8_problem,
    grid_multiplication_matrices,
    roots_from_multiplication_matrices,
    roots_via_schur_baseline,
    sigma_study,
)
from jointeig.synth import fit_loglog_slope, match_eigenvalues

# %% Decoupled system {p1(x1) = 0, p2(x2) = 0}: the roots form a grid.
p1 = [1.0, -3.0, 2.0]   # (x - 1)(x - 2)
p2 = [1.0, 2.5, -1.5]   # (x + 3)(x - 0.5)
fam = grid_multiplication_matrices([p1, p2])
print(f"multiplication matrices: {fam.s} of size {fam.m}, "
      f"commutator residual {fam.commutator_residual:.1e}")

roots, diag = roots_from_multiplication_matrices(fam, "RQ2", seed=3)
print("roots (two-sided readout):")
print(np.round(roots.real, 12))

system = PolynomialSystem.from_grid([p1, p2])
print("system residuals at the computed roots:",
      [f"{evaluate_system_residual(system, r):.1e}" for r in roots])

# %% Baseline: diagonal of the rotated family in a Schur basis of one
# random combination (the first matrix alone has repeated eigenvalues on a
# grid, which is exactly the case the baseline struggles with).
baseline = roots_via_schur_baseline(fam, "random", seed=5)
perm = match_eigenvalues(baseline, roots)
print(f"\nSchur-baseline agreement: "
      f"{np.max(np.linalg.norm(roots - baseline[perm], axis=1)):.1e}")

# %% Shrinking coupling: the root (1/3, 1/3) of a near-double-root system.
sigmas = (1e-1, 1e-2, 1e-3, 1e-4)
rows = sigma_study(example8_problem, sigmas, trials=100, seed=9)
print("\ncoupling sigma vs median error of the root (1/3, 1/3):")
for row in rows:
    print(f"  sigma={row['sigma']:.0e}: {row['median_error']:.2e}")
slope = fit_loglog_slope(sigmas, [row["median_error"] for row in rows])
print(f"log-log slope {slope:.2f} (eigenvalue conditioning degrades as the "
      f"coupling shrinks; the two-sided readout tracks the milder rate)")
