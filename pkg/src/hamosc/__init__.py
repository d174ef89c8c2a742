"""Oscillation criteria and simulation for linear matrix Hamiltonian systems

    Phi' = A(t) Phi + B(t) Psi,    Psi' = C(t) Phi - A*(t) Psi.

The criteria are sufficient conditions evaluated on a finite horizon; a
positive verdict is a certified *trend*, and direct simulation of det Phi is
run alongside as a cross-check.
"""
from .calculus import DivergenceTrace, Quadrature, Trend, classify_divergence, integrate_matrix, integrate_scalar
from .config import DEFAULT, Tolerances
from .criteria import (
    CHECKERS, CriterionConfig, VerdictTable, check_C3_1, check_T1_1, check_T3_1, check_T3_2, check_T3_3,
    check_T3_4, check_T3_5, check_T3_6, check_T3_7_and_C2_2, run_all,
)
from .dynamics import (
    ConjoinedInitialData, check_correspondence_2_19, find_det_zeros, integrate_hamiltonian,
    integrate_matrix_riccati, simulate_oscillation,
)
from .errors import HamoscError
from .expr import diff_expr, eval_expr, parse_expr
from .matrix_core import (
    PositiveFunctional, apply_functional, hermitian_eigen, lambda_min, matrix_exp, nu_0, nu_g, separator,
    sqrt_psd, sum_entries,
)
from .matrix_equations import (
    SolveStatus, h_lambda_by_quadrature, omega_n_check, solve_bx_eq_a, solve_lyapunov, solve_sep_equation,
    solve_sqrt_b_equation,
)
from .problem import HamiltonianProblem, MatrixFunction, eval_matrix, load_problem
from .scalar_riccati import (
    ScalarRiccatiProblem, TwoByTwoSystem, solve_scalar_riccati, theorem_2_2_oscillation_check,
)
from .verdict import CriterionVerdict, VerdictStatus

__version__ = "0.1.0"
