"""Pointwise solvers for the linear matrix equations used by the criteria.

* ``B X = A``                              -- :func:`solve_bx_eq_a`
* ``sqrt(B) X G = G``, ``G = A sqrt(B) - sqrt(B)'`` -- :func:`solve_sqrt_b_equation`
* ``B X + X B = R``                        -- :func:`solve_lyapunov`, :func:`h_lambda_by_quadrature`
* ``B X = Sep(alpha A + beta A* + gamma I)`` -- :func:`solve_sep_equation`

Every solver returns a :class:`SolveReport`; "no solution" is a status, not an
exception.
"""
from dataclasses import dataclass, field
import enum

import numpy as np
import scipy.linalg

from . import expr as ex
from .calculus import Quadrature, integrate_scalar
from .config import DEFAULT
from .errors import NoConvergence, NotPositiveDefinite, RankTooLow
from .matrix_core import (
    as_matrix, hermitian_eigen, hermitian_part, is_hermitian, is_singular_psd,
    separator, sqrt_psd,
)
from .problem import MatrixFunction, sqrt_diagonal


class SolveStatus(enum.Enum):
    UNIQUE = "Unique"
    NON_UNIQUE = "NonUniqueSolutionReturned"
    NO_SOLUTION = "NoSolution"
    NO_HERMITIAN = "NoHermitianSolution"


@dataclass
class SolveReport:
    status: SolveStatus
    solution: np.ndarray = None
    residual: float = float("nan")
    ranks: tuple = None
    case: str = ""
    notes: list = field(default_factory=list)
    rhs_norm: float = 0.0

    @property
    def solved(self):
        return self.status in (SolveStatus.UNIQUE, SolveStatus.NON_UNIQUE)

    def to_json(self):
        return {
            "status": self.status.value,
            "residual": self.residual,
            "ranks": list(self.ranks) if self.ranks else None,
            "case": self.case,
            "notes": list(self.notes),
        }


def _norm(M):
    return float(np.linalg.norm(M))


def numerical_rank(M, tol=DEFAULT):
    """Rank from singular values above ``rank_rel * sigma_max``."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0 or not np.any(M):
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > tol.rank_rel * sv[0]))


def _min_norm(B, rhs, tol):
    X, *_ = np.linalg.lstsq(B, rhs, rcond=tol.rank_rel)
    return X


def solve_bx_eq_a(B, A, tol=DEFAULT):
    """Solve ``B X = A``; solvability by the Kronecker-Capelli rank test.

    When ``B`` is singular but the system is consistent the minimum-norm
    solution is returned with status ``NonUniqueSolutionReturned``.
    """
    B = as_matrix(B)
    A = np.asarray(A, dtype=complex)
    if A.shape[0] != B.shape[0]:
        raise ValueError("B and A must have the same number of rows")
    rb = numerical_rank(B, tol)
    # a full-rank B leaves no room for the augmented rank to grow
    rab = rb if rb == B.shape[0] else numerical_rank(np.hstack([B, A]), tol)
    rhs_norm = _norm(A)
    if rab > rb:
        return SolveReport(SolveStatus.NO_SOLUTION, None, float("nan"), (rb, rab), "rank", rhs_norm=rhs_norm)
    if rb == B.shape[0]:
        X = np.linalg.solve(B, A)
        status = SolveStatus.UNIQUE
    else:
        X = _min_norm(B, A, tol)
        status = SolveStatus.NON_UNIQUE
    return SolveReport(status, X, _norm(B @ X - A), (rb, rab), "direct", rhs_norm=rhs_norm)


# ---------------------------------------------------------------- sqrt(B) X G = G

def sqrt_b_pair(B, t, tol=DEFAULT):
    """``(sqrt(B(t)), d/dt sqrt(B(t)), path)`` for a matrix function ``B``.

    Structurally diagonal real ``B`` gets an exact symbolic root; anything
    else is rooted pointwise and differentiated by central differences.
    """
    if isinstance(B, MatrixFunction) and B.is_diagonal and B.is_real_structurally:
        root = sqrt_diagonal(B)
        if B.is_constant:
            return root(t), np.zeros((B.n, B.n), dtype=complex), "symbolic"
        return root(t), root.derivative()(t), "symbolic"
    h = tol.fd_step
    S = sqrt_psd(B(t), tol)
    dS = (sqrt_psd(B(t + h), tol) - sqrt_psd(B(t - h), tol)) / (2 * h)
    return S, dS, "numeric"


def solve_sqrt_b_matrices(S, dS, A, tol=DEFAULT):
    """Solve ``S X G = G`` with ``G = A S - dS``.

    Split into ``S Y = G`` (rank tested) and ``X G = Y``; the second is always
    consistent once the first is, and ``X = Y G^+`` solves it.
    """
    S = as_matrix(S)
    G = np.asarray(A, dtype=complex) @ S - np.asarray(dS, dtype=complex)
    first = solve_bx_eq_a(S, G, tol)
    rhs_norm = _norm(G)
    if not first.solved:
        report = SolveReport(SolveStatus.NO_SOLUTION, None, float("nan"), first.ranks, "rank", rhs_norm=rhs_norm)
        report.notes.append("sqrt(B) Y = G inconsistent")
        return report, G
    X = first.solution @ np.linalg.pinv(G, rcond=tol.rank_rel)
    rg = numerical_rank(G, tol)
    n = S.shape[0]
    unique = first.status is SolveStatus.UNIQUE and rg == n
    status = SolveStatus.UNIQUE if unique else SolveStatus.NON_UNIQUE
    report = SolveReport(status, X, _norm(S @ X @ G - G), first.ranks, "two-step", rhs_norm=rhs_norm)
    return report, G


def solve_sqrt_b_equation(B, A, t, tol=DEFAULT):
    """Pointwise solve of ``sqrt(B) X (A sqrt(B) - sqrt(B)') = A sqrt(B) - sqrt(B)'`` at ``t``."""
    S, dS, path = sqrt_b_pair(B, t, tol)
    Amat = A(t) if callable(A) else A
    report, _ = solve_sqrt_b_matrices(S, dS, Amat, tol)
    report.notes.append(f"sqrt(B) path: {path}")
    return report


# ---------------------------------------------------------------- B X + X B = R

def solve_lyapunov(B, R, tol=DEFAULT):
    """Solve ``B X + X B = R`` for Hermitian ``B`` in its eigenbasis.

    Returns the Hermitian part of the solution whenever ``R`` is Hermitian.
    """
    B = as_matrix(B)
    R = as_matrix(R)
    spec = hermitian_eigen(B, tol)
    U, b = spec.vectors, spec.values
    Rt = U.conj().T @ R @ U
    denom = b[:, None] + b[None, :]
    small = np.abs(denom) <= tol.singular_rel * max(1.0, float(np.max(np.abs(b))))
    rhs_norm = _norm(R)
    if np.any(np.abs(Rt[small]) > tol.residual_rel * (1.0 + rhs_norm)):
        report = SolveReport(SolveStatus.NO_SOLUTION, None, float("nan"), None, "eigenbasis", rhs_norm=rhs_norm)
        report.notes.append("b_j + b_k = 0 with a nonzero right-hand side component")
        return report
    Xt = np.where(small, 0.0, Rt / np.where(small, 1.0, denom))
    X = U @ Xt @ U.conj().T
    if is_hermitian(R, tol.hermitian * max(1.0, rhs_norm)):
        X = hermitian_part(X)
    status = SolveStatus.NON_UNIQUE if np.any(small) else SolveStatus.UNIQUE
    return SolveReport(status, X, _norm(B @ X + X @ B - R), None, "eigenbasis", rhs_norm=rhs_norm)


def _geometric_breaks(scale, upper):
    breaks = [0.0]
    step = scale
    while breaks[-1] < upper:
        breaks.append(min(upper, breaks[-1] + step))
        step *= 2.0
    return breaks


def h_lambda_by_quadrature(B, R, tau_max=None, quad=Quadrature(panels=4, atol=1e-12, rtol=1e-10), tol=DEFAULT):
    """``int_0^tau_max exp(-tau B) R exp(-tau B) dtau`` by Simpson quadrature.

    For ``B > 0`` this is the solution of ``B X + X B = R``.  A singular
    ``B >= 0`` is accepted only with ``R = 0``, in which case the result is 0.
    """
    B = as_matrix(B)
    R = as_matrix(R)
    spec = hermitian_eigen(B, tol)
    lam1, lamn = spec.values[0], spec.values[-1]
    if is_singular_psd(spec.values, tol) or lam1 <= 0:
        if _norm(R) <= tol.residual_rel:
            return np.zeros_like(R)
        raise NotPositiveDefinite(f"lambda_1(B) = {lam1:.3e} and the right-hand side is nonzero")
    if tau_max is None:
        tau_max = max(50.0, 23.0 / lam1)

    def integrand(tau):
        E = scipy.linalg.expm(-tau * B)
        return E @ R @ E

    total = np.zeros_like(R)
    breaks = _geometric_breaks(0.25 / lamn, tau_max)
    for a, b in zip(breaks[:-1], breaks[1:]):
        total = total + integrate_scalar(integrand, a, b, quad).value
    return total


def sep_case_mu(B, A, tol=DEFAULT):
    """Scalar ``mu`` making ``B X + X B = 2 mu I + (A + A*)`` solvable.

    Handles ``rank B >= n - 1``.  For full rank ``mu = 0``.  For rank
    ``n - 1`` the problem is rotated so that ``B = diag(0, B_1)``, the shift
    cancels the (1,1) entry and the remaining blocks are solved with
    ``B_1 > 0``.  Returns ``(mu, report)`` for the multiplier ``Lambda = mu I``,
    so the right-hand side is ``2 mu I + A + A*``.
    """
    B = as_matrix(B)
    A = as_matrix(A)
    n = B.shape[0]
    spec = hermitian_eigen(B, tol)
    b = spec.values
    thresh = tol.singular_rel * max(1.0, abs(b[-1]))
    rank = int(np.sum(b > thresh))
    R0 = A + A.conj().T
    if rank == n:
        report = solve_lyapunov(B, R0, tol)
        report.case = "full rank"
        return 0.0, report
    if rank < n - 1:
        raise RankTooLow(f"rank B = {rank} < n - 1 = {n - 1}")
    U = spec.vectors
    At = U.conj().T @ R0 @ U
    mu = -At[0, 0].real / 2
    At = At + 2 * mu * np.eye(n)
    B1 = np.diag(b[1:])
    V = np.zeros((n, n), dtype=complex)
    V[0, 1:] = At[0, 1:] @ np.linalg.inv(B1)
    V[1:, 0] = np.linalg.solve(B1, At[1:, 0])
    inner = solve_lyapunov(B1, At[1:, 1:], tol)
    V[1:, 1:] = inner.solution
    X = hermitian_part(U @ V @ U.conj().T)
    R = R0 + 2 * mu * np.eye(n)
    report = SolveReport(SolveStatus.NON_UNIQUE, X, _norm(B @ X + X @ B - R), (rank, None), "rank n-1 block", rhs_norm=_norm(R))
    return mu, report


# ---------------------------------------------------------------- B X = Sep(A_{alpha,beta,gamma})

def a_alpha_beta_gamma(A, alpha, beta, gamma):
    A = np.asarray(A, dtype=complex)
    return alpha * A + beta * A.conj().T + gamma * np.eye(A.shape[0])


def _fit_scale(target, basis):
    denom = np.vdot(basis, basis).real
    if denom == 0:
        return 0.0
    return np.vdot(basis, target).real / denom


def _block_structure(diag, tol):
    """Runs of equal nonzero values followed by a run of zeros, or ``None``."""
    n = len(diag)
    zeros = np.abs(diag) <= tol
    m = 0
    while m < n and zeros[n - 1 - m]:
        m += 1
    if np.any(zeros[: n - m]):
        return None
    blocks = []
    start = 0
    for k in range(1, n - m + 1):
        if k == n - m or abs(diag[k] - diag[start]) > tol:
            blocks.append((start, k, diag[start]))
            start = k
    return blocks, m


def solve_sep_matrices(B, S, tol=DEFAULT):
    """Hermitian solution of ``B X = S`` for Hermitian ``S``.

    Tries, in order: ``S = 0``; ``B = sigma S``; ``B = sigma sqrt(S)``;
    block-diagonal ``B`` against diagonal ``S``; then a general solve whose
    Hermitian part must still satisfy the equation.
    """
    B = as_matrix(B)
    S = as_matrix(S)
    n = B.shape[0]
    scale = 1.0 + _norm(S)
    atol = tol.residual_rel * scale
    tried = []

    def done(X, case, status=SolveStatus.NON_UNIQUE):
        report = SolveReport(status, X, _norm(B @ X - S), None, case, rhs_norm=_norm(S))
        report.notes.append("tried: " + ", ".join(tried + [case]))
        return report

    tried_case = "IV"
    if _norm(S) <= atol:
        return done(np.zeros((n, n), dtype=complex), tried_case)
    tried.append(tried_case)

    sigma = _fit_scale(B, S)
    if sigma != 0 and _norm(B - sigma * S) <= tol.residual_rel * (1.0 + _norm(B)):
        X = np.eye(n) / sigma
        if _norm(B @ X - S) <= atol:
            return done(X.astype(complex), "I")
    tried.append("I")

    values = hermitian_eigen(S, tol).values
    if values[0] >= -1e-12 * scale:
        root = sqrt_psd(S, tol)
        sigma = _fit_scale(B, root)
        if sigma != 0 and _norm(B - sigma * root) <= tol.residual_rel * (1.0 + _norm(B)):
            X = root / sigma
            if _norm(B @ X - S) <= atol:
                return done(X, "II")
    tried.append("II")

    offdiag = S - np.diag(np.diag(S))
    if _norm(offdiag) <= atol:
        structure = _block_structure(np.diag(S).real, atol)
        if structure is not None:
            blocks, m = structure
            mask = np.zeros((n, n), dtype=bool)
            for a, b, _ in blocks:
                mask[a:b, a:b] = True
            if _norm(np.where(mask, 0.0, B)) <= atol:
                X = np.zeros((n, n), dtype=complex)
                ok = True
                for a, b, nu in blocks:
                    Bk = B[a:b, a:b]
                    vals = hermitian_eigen(Bk, tol).values
                    if is_singular_psd(vals, tol) or vals[0] <= 0:
                        ok = False
                        break
                    X[a:b, a:b] = nu * np.linalg.inv(Bk)
                if ok and _norm(B @ X - S) <= atol:
                    return done(hermitian_part(X), "III")
    tried.append("III")

    general = solve_bx_eq_a(B, S, tol)
    if not general.solved:
        general.notes.append("tried: " + ", ".join(tried + ["general"]))
        general.case = "general"
        return general
    H = hermitian_part(general.solution)
    if _norm(B @ H - S) <= atol:
        return done(H, "general", general.status)
    report = SolveReport(SolveStatus.NO_HERMITIAN, None, _norm(B @ H - S), general.ranks, "general", rhs_norm=_norm(S))
    report.notes.append("solvable, but the Hermitian part of the minimum-norm solution fails")
    return report


def _scalar(value, t):
    if isinstance(value, ex.Expr):
        return ex.eval_expr(value, t)
    if isinstance(value, str):
        return ex.eval_expr(ex.parse_expr(value), t)
    if callable(value):
        return float(value(t))
    return float(value)


def solve_sep_equation(B, A, alpha, beta, gamma, t, tol=DEFAULT):
    """Pointwise Hermitian solve of ``B(t) X = Sep(alpha A + beta A* + gamma I)``."""
    a, b, g = _scalar(alpha, t), _scalar(beta, t), _scalar(gamma, t)
    if abs(a + b - 1.0) > 1e-12:
        raise ValueError(f"alpha + beta must equal 1 (got {a + b!r} at t={t})")
    Bm = B(t) if callable(B) else B
    Am = A(t) if callable(A) else A
    S = separator(a_alpha_beta_gamma(Am, a, b, g))
    return solve_sep_matrices(Bm, S, tol)


# ---------------------------------------------------------------- Omega_n

@dataclass
class OmegaNCheck:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigen_real_parts: np.ndarray
    passes: bool
    spread: float


def char_poly(M):
    """Characteristic polynomial coefficients (highest power first), Faddeev-LeVerrier."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    coeffs = [1.0 + 0j]
    Mk = np.zeros_like(M)
    I = np.eye(n)
    for k in range(1, n + 1):
        Mk = M @ Mk + coeffs[-1] * I
        coeffs.append(-np.trace(M @ Mk) / k)
    return np.array(coeffs)


def durand_kerner(coeffs, max_iter=2000, tol=1e-15):
    """All roots of a monic polynomial by simultaneous iteration."""
    coeffs = np.asarray(coeffs, dtype=complex)
    coeffs = coeffs / coeffs[0]
    n = len(coeffs) - 1
    if n == 0:
        return np.array([], dtype=complex)
    radius = 1.0 + float(np.max(np.abs(coeffs[1:])))
    z = radius * (0.4 + 0.9j) ** np.arange(n)
    for _ in range(max_iter):
        p = np.polyval(coeffs, z)
        diffs = z[:, None] - z[None, :]
        np.fill_diagonal(diffs, 1.0)
        denom = np.prod(diffs, axis=1)
        if np.any(denom == 0):
            z = z + 1e-9 * radius * (0.3 + 0.7j) ** np.arange(n)
            continue
        step = p / denom
        z = z - step
        if np.max(np.abs(step)) <= tol * max(1.0, float(np.max(np.abs(z)))):
            return z
    if np.max(np.abs(np.polyval(coeffs, z))) > 1e-8 * max(1.0, radius) ** n:
        raise NoConvergence("Durand-Kerner iteration did not converge")
    return z


def omega_n_check(M, tol=DEFAULT):
    """Do all eigenvalues of ``M`` share one real part?"""
    M = as_matrix(M)
    n = M.shape[0]
    shift = np.trace(M) / n
    roots = durand_kerner(char_poly(M - shift * np.eye(n))) + shift
    re = np.sort(roots.real)
    spread = float(re[-1] - re[0])
    passes = spread <= tol.omega_spread * (1.0 + float(np.max(np.abs(roots))))
    return OmegaNCheck(M, roots, re, passes, spread)
