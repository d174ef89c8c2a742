import numpy as np
import pytest

from hamosc import catalog
from hamosc.errors import RankTooLow
from hamosc.matrix_equations import (
    SolveStatus, char_poly, durand_kerner, h_lambda_by_quadrature, numerical_rank, omega_n_check,
    sep_case_mu, solve_bx_eq_a, solve_lyapunov, solve_sep_equation, solve_sep_matrices, solve_sqrt_b_equation,
)
from hamosc.matrix_core import separator
from hamosc.problem import MatrixFunction

U, N, NS = SolveStatus.UNIQUE, SolveStatus.NON_UNIQUE, SolveStatus.NO_SOLUTION


def _within_residual_bound(rep, rhs):
    return rep.residual <= 1e-8 * (1 + np.linalg.norm(rhs))


def test_identity_coefficient_gives_rhs():
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    rep = solve_bx_eq_a(np.eye(2), A)
    assert rep.status is U
    assert np.allclose(rep.solution, A)


def test_singular_b_with_inconsistent_rhs():
    rep = solve_bx_eq_a(np.diag([1.0, 0.0]), [[0.0, 1.0], [0.0, 1.0]])
    assert rep.status is NS
    assert rep.ranks == (1, 2)


def test_singular_b_minimum_norm_solution():
    rep = solve_bx_eq_a(np.diag([1.0, 0.0]), np.diag([1.0, 0.0]))
    assert rep.status is N
    assert np.allclose(rep.solution, np.diag([1.0, 0.0]))
    assert _within_residual_bound(rep, np.diag([1.0, 0.0]))


def test_numerical_rank_threshold():
    assert numerical_rank(np.diag([1.0, 1e-14])) == 1
    assert numerical_rank(np.diag([1.0, 1e-6])) == 2
    assert numerical_rank(np.zeros((3, 3))) == 0


def test_sqrt_b_equation_with_identity():
    B = MatrixFunction.identity(2)
    A = MatrixFunction.from_strings([["1", "t"], ["0", "2"]])
    rep = solve_sqrt_b_equation(B, A, 1.5)
    assert rep.solved
    assert np.allclose(rep.solution @ A(1.5), A(1.5))


def test_sqrt_b_equation_singular_example_admits_zero():
    p = catalog.get("example_3_2")
    rep = solve_sqrt_b_equation(p.B, p.A, 0.0)
    assert rep.solved
    assert np.allclose(rep.solution @ (p.A(0.0) @ np.diag([1.0, 0.0])), 0.0)


def test_sqrt_b_equation_zero_g():
    rep = solve_sqrt_b_equation(MatrixFunction.identity(2), MatrixFunction.constant(np.zeros((2, 2))), 0.0)
    assert rep.status is N
    assert np.allclose(rep.solution, 0.0)


def test_lyapunov_examples():
    rep = solve_lyapunov(np.diag([1.0, 2.0]), [[2.0, 3.0], [3.0, 8.0]])
    assert rep.status is U
    assert np.allclose(rep.solution, [[1.0, 1.0], [1.0, 2.0]])
    M = np.array([[1.0, 2j], [-2j, 3.0]])
    assert np.allclose(solve_lyapunov(np.eye(2), 2 * M).solution, M)
    assert solve_lyapunov(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])).status is NS


def test_lyapunov_solution_is_hermitian():
    rng = np.random.default_rng(2)
    G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    B = G @ G.conj().T + np.eye(4)
    R = G + G.conj().T
    X = solve_lyapunov(B, R).solution
    assert np.abs(X - X.conj().T).max() <= 1e-10


def test_quadrature_form_matches():
    M = np.array([[1.0, 0.5], [0.5, -2.0]])
    assert np.allclose(h_lambda_by_quadrature(np.eye(2), M), M / 2, atol=1e-9)
    H = h_lambda_by_quadrature(np.diag([1.0, 2.0]), np.array([[2.0, 3.0], [3.0, 8.0]]))
    assert np.allclose(H, [[1.0, 1.0], [1.0, 2.0]], atol=1e-8)
    assert np.allclose(h_lambda_by_quadrature(np.eye(2), np.zeros((2, 2))), 0.0)


def test_mu_for_rank_deficient_b():
    c, d, e = 3.0, 1.0 + 2.0j, -1.0
    # A + A* = [[c, d], [conj d, e]]
    A = np.array([[c / 2, d], [0.0, e / 2]])
    mu, rep = sep_case_mu(np.diag([0.0, 1.0]), A)
    assert mu == pytest.approx(-c / 2)
    R = A + A.conj().T + 2 * mu * np.eye(2)
    B = np.diag([0.0, 1.0])
    assert np.linalg.norm(B @ rep.solution + rep.solution @ B - R) <= 1e-10


def test_mu_full_rank_and_rank_too_low():
    A = np.array([[1.0, 2.0], [0.0, 1.0]])
    mu, rep = sep_case_mu(np.diag([1.0, 2.0]), A)
    assert mu == 0.0
    assert np.allclose(rep.solution, solve_lyapunov(np.diag([1.0, 2.0]), A + A.T).solution)
    with pytest.raises(RankTooLow):
        sep_case_mu(np.zeros((2, 2)), A)


def test_sep_equation_cases():
    p = catalog.get("example_3_3_q1")
    rep = solve_sep_equation(p.B, p.A, 1.0, 0.0, 0.0, 2.0)
    assert rep.case == "IV" and np.allclose(rep.solution, 0.0)

    L = np.array([[1.0, 0.0], [0.0, 3.0]])
    S = separator(L)
    rep = solve_sep_equation(2 * S, L, 1.0, 0.0, 0.0, 0.0)
    assert rep.case == "I"
    assert np.allclose(rep.solution, np.eye(2) / 2)

    rep = solve_sep_matrices(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert rep.status is NS and rep.ranks == (1, 2)
    assert "IV, I, II, III, general" in rep.notes[-1]


def test_sep_equation_requires_alpha_plus_beta_one():
    with pytest.raises(ValueError):
        solve_sep_equation(np.eye(2), np.eye(2), 0.3, 0.3, 0.0, 0.0)


def test_omega_check():
    assert not omega_n_check(np.diag([1.0, 2.0])).passes
    assert omega_n_check(np.array([[0.0, 1.0], [-1.0, 0.0]])).passes
    chk = omega_n_check(2.5 * np.eye(3) + np.array([[0, 1, 2], [-1, 0, 3j], [-2, 3j, 0]]))
    assert chk.passes
    assert np.allclose(chk.eigen_real_parts, 2.5)


def test_polynomial_roots_match_eigenvalues():
    rng = np.random.default_rng(4)
    M = rng.standard_normal((5, 5))
    roots = np.sort_complex(durand_kerner(char_poly(M)))
    assert np.allclose(roots, np.sort_complex(np.linalg.eigvals(M)), atol=1e-8)
