"""Joint eigenvalues of nearly commuting matrix families.

The core solver eigendecomposes one random unit-sphere linear combination
of the family and reads the joint eigenvalue tuples off one- or two-sided
Rayleigh quotients of its eigenvector pairs.  Built on top of it:
condition/separation analysis with first-order error bounds, a synthetic
Monte-Carlo experiment lab, a multiparameter eigenvalue solver via operator
determinants, and polynomial root extraction from multiplication matrices.
"""

from . import dense, io, mep, perturbation, polyroots, synth
from .errors import JointeigError
from .mep import MepProblem, MepSolution, mep_residual, right_definite_solve, solve_mep
from .perturbation import (
    BlockDiagonalization,
    BoundReport,
    block_diagonalize,
    evaluate_bounds,
    failure_probability_rq1,
    separation_d_mu,
    spectral_projector,
)
from .polyroots import (
    MultiplicationFamily,
    PolynomialSystem,
    companion,
    evaluate_system_residual,
    grid_multiplication_matrices,
    roots_from_multiplication_matrices,
    roots_via_schur_baseline,
)
from .rjea import (
    RQ1,
    RQ2,
    CommutingFamily,
    JointEigenResult,
    RandomCombination,
    cluster_and_orthonormalize,
    linear_combination,
    rayleigh_one_sided,
    rayleigh_two_sided,
    rjea,
    sample_unit_sphere,
)
from .synth import (
    ExperimentReport,
    FamilySpec,
    add_noise,
    conditioned_basis,
    make_family,
    match_eigenvalues,
    run_trials,
)

__version__ = "0.1.0"

__all__ = [
    "BlockDiagonalization",
    "BoundReport",
    "CommutingFamily",
    "ExperimentReport",
    "FamilySpec",
    "JointEigenResult",
    "JointeigError",
    "MepProblem",
    "MepSolution",
    "MultiplicationFamily",
    "PolynomialSystem",
    "RandomCombination",
    "RQ1",
    "RQ2",
    "add_noise",
    "block_diagonalize",
    "cluster_and_orthonormalize",
    "companion",
    "conditioned_basis",
    "dense",
    "evaluate_bounds",
    "evaluate_system_residual",
    "failure_probability_rq1",
    "grid_multiplication_matrices",
    "io",
    "linear_combination",
    "make_family",
    "match_eigenvalues",
    "mep",
    "mep_residual",
    "perturbation",
    "polyroots",
    "rayleigh_one_sided",
    "rayleigh_two_sided",
    "right_definite_solve",
    "rjea",
    "roots_from_multiplication_matrices",
    "roots_via_schur_baseline",
    "run_trials",
    "sample_unit_sphere",
    "separation_d_mu",
    "solve_mep",
    "spectral_projector",
    "synth",
]
