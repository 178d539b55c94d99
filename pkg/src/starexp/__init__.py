"""Matrix exponential actions ``exp(tA)v`` over a whole time interval.

The solution is expanded in orthonormal Legendre polynomials; its
coefficients solve a Stein matrix equation, either directly (Schur based)
or after projecting onto a Krylov subspace.
"""
from .bench import (
    ExperimentConfig, ResultRow, emit_csv, emit_curve, load_configs, read_csv,
    run_experiment, sweep_M,
)
from .bounds import (
    BoundParams, BoundResult, choose_c, estimate_C_M, laguerre, lemma_star_bound,
    scalar_star_partial_sum, stabilize_shift, theorem_bound,
)
from .dense import SteinProblem, SteinSolver, eig_dense, expm_dense, schur, solve_stein
from .errors import (
    BudgetError, ConstructionError, ConvergenceError, DomainError, InadmissibleParameters,
    MatrixMarketError, NumericalOverflowError, SingularityError, StarExpError,
)
from .expm_action import (
    ConditioningWarning, InitialConditionWarning, IntervalMap, StarExpSolution, evaluate,
    evaluate_grid, residual_diagnostic, solve_arnoldi, solve_direct,
)
from .gallery import GallerySpec, describe, generate, scale_for_interval
from .heaviside import CoeffMatrixSet, assemble_kron, build_T, heaviside_coeff
from .krylov import ArnoldiDecomp, arnoldi
from .legendre import (
    eval_phi, eval_phi_deriv, gauss_legendre, legendre_coefficients, monomial_shift_coeffs,
)
from .mmio import load_matrix_market, write_matrix_market

__version__ = "0.1.0"
