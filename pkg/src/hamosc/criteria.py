"""Oscillation criteria for ``Phi' = A Phi + B Psi, Psi' = C Phi - A* Psi``.

Each ``check_*`` function verifies the hypotheses of one sufficient condition
on a sampled grid, assembles its limit quantities as checkpoint traces and
returns a :class:`CriterionVerdict`.  "Oscillatory" here always means
*trend-certified* on a finite horizon, never proven; "Inconclusive" never
means non-oscillatory.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from . import expr as ex
from .calculus import (
    DivergenceTrace, Quadrature, Trend, classify_trace, cumulative_integral, default_checkpoints,
)
from .config import DEFAULT
from .dynamics import simulate_oscillation
from .errors import HamoscError
from .matrix_core import (
    PositiveFunctional, apply_functional, eigvalsh, hermitian_part, is_singular_psd, nu_0, nu_g,
    separator, sum_entries,
)
from .matrix_equations import (
    SolveStatus, a_alpha_beta_gamma, numerical_rank, omega_n_check, sep_case_mu, solve_bx_eq_a,
    solve_lyapunov, solve_sep_matrices, solve_sqrt_b_equation, sqrt_b_pair,
)
from .problem import MatrixFunction
from .scalar_riccati import TwoByTwoSystem, coefficient, theorem_2_2_oscillation_check
from .verdict import CriterionVerdict, Hypothesis, VerdictStatus

__all__ = [
    "CriterionConfig", "CriterionVerdict", "VerdictStatus", "VerdictTable",
    "check_T1_1", "check_T3_1", "check_T3_2", "check_T3_3", "check_T3_4", "check_T3_5",
    "check_T3_6", "check_C3_1", "check_T3_7_and_C2_2", "run_all", "CHECKERS",
]

_ERRORS = (HamoscError, ArithmeticError, np.linalg.LinAlgError)


@dataclass
class CriterionConfig:
    """Knobs shared by all checkers.

    ``g`` defaults to the trace.  ``weight`` selects ``lambda_1(B)/n`` or
    ``nu_0(B)`` as the coefficient of the quadratic term in the scalar
    reductions.  ``lambda_`` is an optional multiplier matrix; ``alpha`` left
    as ``None`` lets the Sep-based checker try ``1, 0, 1/2`` in turn.
    """

    g: PositiveFunctional = None
    horizon: float = DEFAULT.horizon
    theta: float = None
    window: int = DEFAULT.window
    checkpoints: int = DEFAULT.checkpoints
    weight: str = "lambda1"
    lambda_: MatrixFunction = None
    alpha: object = None
    beta: object = None
    gamma: object = 0.0
    fd_step: float = DEFAULT.fd_step
    quad: Quadrature = Quadrature(atol=1e-8, rtol=1e-8)
    tol: object = DEFAULT

    def functional(self, n):
        return self.g if self.g is not None else PositiveFunctional.trace(n)

    def grid(self, p):
        return default_checkpoints(p.t0, p.t0 + self.horizon, self.checkpoints)


# ---------------------------------------------------------------- helpers

def _trace(name, ts, cfg, integrand=None, point=None):
    """``point(t) + int_{t0}^t integrand`` on the checkpoints, classified."""
    try:
        if integrand is not None:
            ints, _, _ = cumulative_integral(lambda t: float(np.real(integrand(t))), ts, cfg.quad)
        else:
            ints = np.zeros(len(ts))
        values = np.array([float(np.real(point(t))) if point else 0.0 for t in ts]) + ints
    except _ERRORS as err:
        trace = DivergenceTrace(name, ts, np.full(len(ts), np.nan), Trend.UNDETERMINED,
                                float("nan"), cfg.window)
        trace.failed_at = getattr(err, "t", None)
        trace.reasons.append(f"evaluation failed: {err}")
        return trace
    return classify_trace(ts, values, cfg.theta, cfg.window, name=name)


def _sample(verdict, name, ts, test):
    """Run ``test(t) -> (ok, evidence)`` over the grid; record the first failure."""
    for t in ts:
        try:
            ok, evidence = test(t)
        except _ERRORS as err:
            ok, evidence = False, f"evaluation failed: {err}"
        if not ok:
            return verdict.require(name, False, evidence, float(t))
    return verdict.require(name, True, f"sampled at {len(ts)} points")


def _psd_test(p, tol, strict):
    def test(t):
        values = eigvalsh(p.coefficients(t)[1], tol)
        scale = max(1.0, abs(values[-1]))
        if strict:
            ok = not is_singular_psd(values, tol) and values[0] > 0
        else:
            ok = values[0] >= -tol.hermitian * scale
        return ok, f"lambda_1(B) = {values[0]:.6g}"
    return test


def _real_hypothesis(verdict, p):
    return verdict.require("real coefficients", p.is_real,
                           "" if p.is_real else "A, B or C has a structurally nonzero imaginary part")


def _weight_fn(cfg, p):
    n = p.n
    if cfg.weight == "nu0":
        return lambda t: nu_0(p.coefficients(t)[1], cfg.tol)
    return lambda t: max(eigvalsh(p.coefficients(t)[1], cfg.tol)[0], 0.0) / n


def _is_constant(p, cfg):
    mats = [p.A, p.B, p.C] + ([cfg.lambda_] if cfg.lambda_ is not None else [])
    if not all(M.is_constant for M in mats):
        return False
    for value in (cfg.alpha, cfg.beta, cfg.gamma):
        if value is None or isinstance(value, (int, float)):
            continue
        if callable(value) and not isinstance(value, ex.Expr):
            return False
        if ex.has_t(ex._lift(value)):
            return False
    return True


def _delegate(verdict, system, cfg, p=None):
    """Hand a reduced 2x2 system to the scalar test and merge the outcome.

    For a constant problem the reduced coefficients are constant too, so they
    are evaluated once and frozen.
    """
    if p is not None and _is_constant(p, cfg):
        t0 = system.t0
        system = TwoByTwoSystem(*(float(f(t0)) for f, _ in system._f), t0)
        verdict.notes.append("constant problem: reduced coefficients frozen at t0")
    inner = theorem_2_2_oscillation_check(system, cfg.horizon, cfg.theta, cfg.window, cfg.checkpoints,
                                          simulate=False, criterion_id=verdict.criterion_id,
                                          quad=cfg.quad)
    verdict.hypotheses.extend(inner.hypotheses)
    verdict.traces.extend(inner.traces)
    verdict.notes.extend(inner.notes)
    return verdict


def _memo(fn, limit=50000):
    cache = {}

    def wrapped(t):
        t = float(t)
        hit = cache.get(t)
        if hit is None:
            if len(cache) > limit:
                cache.clear()
            hit = cache[t] = fn(t)
        return hit
    return wrapped


def _central(fn, t, h):
    return (fn(t + h) - fn(t - h)) / (2 * h)


# ---------------------------------------------------------------- B > 0 family

def check_T1_1(p, cfg=CriterionConfig()):
    """``int ds / g(B^{-1}) -> inf`` and ``g[-int (C + A* B^{-1} A) - B^{-1} A] -> inf``."""
    v = CriterionVerdict("T1.1")
    ts = cfg.grid(p)
    g = cfg.functional(p.n)
    if not _real_hypothesis(v, p):
        return v
    if not _sample(v, "B(t) > 0", ts, _psd_test(p, cfg.tol, strict=True)):
        return v

    def inv_b(t):
        return np.linalg.inv(p.coefficients(t)[1])

    def integrand(t):
        A, B, C = p.coefficients(t)
        return -apply_functional(g, C + A.conj().T @ np.linalg.solve(B, A))

    v.traces.append(_trace("int 1/g(B^-1)", ts, cfg, lambda t: 1.0 / apply_functional(g, inv_b(t)).real))
    v.traces.append(_trace("g[-int(C + A* B^-1 A) - B^-1 A]", ts, cfg, integrand,
                           lambda t: -apply_functional(g, inv_b(t) @ p.coefficients(t)[0])))
    return v


def _f31(p, tol):
    def F(t):
        A, B, _ = p.coefficients(t)
        rep = solve_bx_eq_a(B, A, tol)
        if not rep.solved:
            raise ArithmeticError(f"B X = A has no solution at t={t:g} (ranks {rep.ranks})")
        return rep.solution
    return F


def _rank_test(p, tol):
    def test(t):
        A, B, _ = p.coefficients(t)
        rb, rab = numerical_rank(B, tol), numerical_rank(np.hstack([B, A]), tol)
        return rb == rab, f"rank B = {rb}, rank (B|A) = {rab}"
    return test


def check_T3_1(p, cfg=CriterionConfig()):
    """``B >= 0``, ``int nu_g(B) -> inf`` and ``g(J_F) -> inf`` with ``B F = A``.

    ``J_F(t) = -int (C + A* F) - F(t)``; ``F`` is the minimum-norm solution.
    For ``B > 0`` this reduces to the ``T1.1`` quantities.
    """
    v = CriterionVerdict("T3.1")
    ts = cfg.grid(p)
    g = cfg.functional(p.n)
    if not _real_hypothesis(v, p):
        return v
    if not _sample(v, "B(t) >= 0", ts, _psd_test(p, cfg.tol, strict=False)):
        return v
    if not _sample(v, "B X = A solvable", ts, _rank_test(p, cfg.tol)):
        return v
    F = _memo(_f31(p, cfg.tol))
    v.auxiliary["F(t0)"] = F(p.t0)

    def integrand(t):
        A, _, C = p.coefficients(t)
        return -apply_functional(g, C + A.conj().T @ F(t))

    v.traces.append(_trace("int nu_g(B)", ts, cfg, lambda t: nu_g(g, p.coefficients(t)[1], cfg.tol)))
    v.traces.append(_trace("g(J_F)", ts, cfg, integrand, lambda t: -apply_functional(g, F(t))))
    return v


def check_T3_2(p, cfg=CriterionConfig()):
    """Scalar reduction with ``a12 = nu_g(B)`` and ``a21 = g[C + A* F + F']``.

    The sign of ``a21`` follows from the Riccati equation for ``g(Y + F)``;
    with it, ``-int a21`` is ``g(J_F)`` up to a constant, matching ``T3.1``.
    """
    v = CriterionVerdict("T3.2")
    ts = cfg.grid(p)
    g = cfg.functional(p.n)
    if not _real_hypothesis(v, p):
        return v
    if not _sample(v, "B(t) >= 0", ts, _psd_test(p, cfg.tol, strict=False)):
        return v
    if not _sample(v, "B X = A solvable", ts, _rank_test(p, cfg.tol)):
        return v
    F = _memo(_f31(p, cfg.tol))
    h = cfg.fd_step
    if not _sample(v, "F differentiable", ts, lambda t: (np.all(np.isfinite(_central(F, t, h))), "")):
        return v

    def a21(t):
        A, _, C = p.coefficients(t)
        return apply_functional(g, C + A.conj().T @ F(t) + _central(F, t, h)).real

    system = TwoByTwoSystem(0.0, lambda t: nu_g(g, p.coefficients(t)[1], cfg.tol), a21, 0.0, p.t0)
    return _delegate(v, system, cfg, p)


def check_T3_3(p, cfg=CriterionConfig()):
    """``B > 0``, ``int lambda_1(B) -> inf`` and ``J -> inf`` where

    ``J = tr[(A + A*)/2 B^{-1}] - int tr[A B^{-1} A* + C]
    + int lambda_1(B)/n [tr((A - A*)/2i)]^2``.
    """
    v = CriterionVerdict("T3.3")
    ts = cfg.grid(p)
    n = p.n
    if not _sample(v, "B(t) > 0", ts, _psd_test(p, cfg.tol, strict=True)):
        return v

    def lam1(t):
        return eigvalsh(p.coefficients(t)[1], cfg.tol)[0]

    def point(t):
        A, B, _ = p.coefficients(t)
        return np.trace((A + A.conj().T) / 2 @ np.linalg.inv(B)).real

    def integrand(t):
        A, B, C = p.coefficients(t)
        im = np.trace((A - A.conj().T) / 2j).real
        return -np.trace(A @ np.linalg.solve(B, A.conj().T) + C).real + lam1(t) / n * im * im

    if cfg.weight == "nu0":
        v.traces.append(_trace("int nu_0(B)", ts, cfg, lambda t: nu_0(p.coefficients(t)[1], cfg.tol)))
    else:
        v.traces.append(_trace("int lambda_1(B)", ts, cfg, lam1))
    v.traces.append(_trace("J", ts, cfg, integrand, point))
    return v


def check_T3_4(p, cfg=CriterionConfig()):
    """``B > 0``, ``int dt / tr(B^{-1}) -> inf`` and

    ``-tr[2 (A + A*) B^{-1} + int ((A + A*) B^{-1} (A + A*) + 4 C)] -> inf``.
    The integrand's otherwise undefined ``G`` is taken to be ``C``.
    """
    v = CriterionVerdict("T3.4")
    v.notes.append("G in the integrand read as C")
    ts = cfg.grid(p)
    if not _sample(v, "B(t) > 0", ts, _psd_test(p, cfg.tol, strict=True)):
        return v

    def point(t):
        A, B, _ = p.coefficients(t)
        return -np.trace(2 * (A + A.conj().T) @ np.linalg.inv(B)).real

    def integrand(t):
        A, B, C = p.coefficients(t)
        S = A + A.conj().T
        return -np.trace(S @ np.linalg.solve(B, S) + 4 * C).real

    v.traces.append(_trace("int 1/tr(B^-1)", ts, cfg,
                           lambda t: 1.0 / np.trace(np.linalg.inv(p.coefficients(t)[1])).real))
    v.traces.append(_trace("-tr[2(A+A*)B^-1 + int((A+A*)B^-1(A+A*) + 4C)]", ts, cfg, integrand, point))
    return v


# ---------------------------------------------------------------- B >= 0 family

def check_T3_5(p, cfg=CriterionConfig()):
    """``J_2 -> inf`` with ``A_F = F (A sqrt(B) - sqrt(B)')`` and ``F`` solving

    ``sqrt(B) F (A sqrt(B) - sqrt(B)') = A sqrt(B) - sqrt(B)'``;
    ``J_2 = -tr(A_F + A_F*)/2 - int tr[A_F A_F* + B C] + (1/n) int [tr((A_F - A_F*)/2i)]^2``.
    """
    v = CriterionVerdict("T3.5")
    ts = cfg.grid(p)
    n = p.n
    if not _sample(v, "B(t) >= 0", ts, _psd_test(p, cfg.tol, strict=False)):
        return v

    def solvable(t):
        rep = solve_sqrt_b_equation(p.B, p.A, t, cfg.tol)
        return rep.solved, f"rank sqrt(B) = {rep.ranks[0]}, rank (sqrt(B)|G) = {rep.ranks[1]}"

    if not _sample(v, "sqrt(B) X G = G solvable", ts, solvable):
        return v
    path = sqrt_b_pair(p.B, p.t0, cfg.tol)[2]
    v.notes.append(f"sqrt(B) derivative path: {path}")

    @_memo
    def a_f(t):
        S, dS, _ = sqrt_b_pair(p.B, t, cfg.tol)
        G = p.coefficients(t)[0] @ S - dS
        rep = solve_sqrt_b_equation(p.B, p.A, t, cfg.tol)
        if not rep.solved:
            raise ArithmeticError(f"sqrt(B) X G = G unsolvable at t={t:g}")
        return rep.solution @ G

    v.auxiliary["A_F(t0)"] = a_f(p.t0)

    def point(t):
        AF = a_f(t)
        return -0.5 * np.trace(AF + AF.conj().T).real

    def integrand(t):
        AF = a_f(t)
        _, B, C = p.coefficients(t)
        im = np.trace((AF - AF.conj().T) / 2j).real
        return -np.trace(AF @ AF.conj().T + B @ C).real + im * im / n

    v.traces.append(_trace("J_2", ts, cfg, integrand, point))
    return v


def _lambda_fn(Lmf):
    return lambda t: Lmf(t)


def _scalar_part_test(L):
    def test(t):
        S = L(t) + L(t).conj().T
        c = np.trace(S).real / S.shape[0]
        off = float(np.linalg.norm(S - c * np.eye(S.shape[0])))
        return off <= 1e-8 * (1.0 + abs(c)), f"|Lambda + Lambda* - cI| = {off:.3g}"
    return test


def _omega_test(L, tol):
    def test(t):
        chk = omega_n_check(L(t), tol)
        return chk.passes, f"real-part spread {chk.spread:.3g}"
    return test


def check_T3_6(p, cfg=CriterionConfig()):
    """Reduction through a Hermitian ``F`` with ``B F + F B = Lambda + Lambda* + A + A*``.

    Scalar system: ``a12 = lambda_1(B)/n`` (or ``nu_0``), ``a21 = -tr D_F``,
    ``E = -(1/n) tr(Lambda + Lambda*)`` where
    ``D_F = -F' + F B F - F A - A* F - C``.  The cross term only collapses to
    a multiple of ``tr Z`` when ``Lambda + Lambda*`` is scalar, so that is
    checked in addition to membership in Omega_n.  Without a user ``Lambda``
    the checker tries ``Lambda = 0`` and then ``Lambda = mu I`` (rank B >= n-1).
    """
    v = CriterionVerdict("T3.6")
    ts = cfg.grid(p)
    n = p.n
    tol = cfg.tol
    if not _sample(v, "B(t) >= 0", ts, _psd_test(p, tol, strict=False)):
        return v

    def lyap(t, L):
        A, B, _ = p.coefficients(t)
        R = L + L.conj().T + A + A.conj().T
        rep = solve_lyapunov(B, R, tol)
        if not rep.solved or rep.residual > tol.residual_rel * (1.0 + rep.rhs_norm):
            raise ArithmeticError(f"B X + X B = Lambda + Lambda* + A + A* unsolvable at t={t:g}")
        return rep.solution

    if cfg.lambda_ is not None:
        L = _memo(_lambda_fn(cfg.lambda_))
        F = _memo(lambda t: lyap(t, L(t)))
        v.notes.append("Lambda supplied by the user")
    else:
        zero = np.zeros((n, n), dtype=complex)
        ok = True
        for t in ts:
            try:
                lyap(t, zero)
            except ArithmeticError:
                ok = False
                break
        if ok:
            L = lambda t: zero
            F = _memo(lambda t: lyap(t, zero))
            v.notes.append("Lambda = 0")
        else:
            @_memo
            def case_two(t):
                A, B, _ = p.coefficients(t)
                return sep_case_mu(B, A, tol)

            def L(t):
                return case_two(t)[0] * np.eye(n, dtype=complex)

            def F(t):
                mu, rep = case_two(t)
                return rep.solution

            v.notes.append("Lambda = mu(t) I from the rank n-1 construction")

    if not _sample(v, "Lambda in Omega_n", ts, _omega_test(L, tol)):
        return v
    if not _sample(v, "Lambda + Lambda* scalar", ts, _scalar_part_test(L)):
        return v
    if not _sample(v, "F Hermitian solution exists", ts, lambda t: (bool(np.all(np.isfinite(F(t)))), "")):
        return v
    h = cfg.fd_step
    v.auxiliary["F(t0)"] = F(p.t0)

    def a21(t):
        A, B, C = p.coefficients(t)
        Ft = F(t)
        D = -_central(F, t, h) + Ft @ B @ Ft - Ft @ A - A.conj().T @ Ft - C
        return -np.trace(D).real

    def e(t):
        Lt = L(t)
        return -np.trace(Lt + Lt.conj().T).real / n

    system = TwoByTwoSystem(e, _weight_fn(cfg, p), a21, 0.0, p.t0)
    return _delegate(v, system, cfg, p)


def check_C3_1(p, cfg=CriterionConfig()):
    """Leighton-type test with ``F = 0``, valid when ``Lambda + A`` is skew.

    Weighted integrals ``int nu_0(B) exp((1/n) int tr(Lambda + Lambda*))`` and
    ``-int tr C exp(-(1/n) int tr(Lambda + Lambda*))``.  Default
    ``Lambda = -(A + A*)/2``.
    """
    v = CriterionVerdict("C3.1")
    ts = cfg.grid(p)
    n = p.n
    tol = cfg.tol
    if not _sample(v, "B(t) >= 0", ts, _psd_test(p, tol, strict=False)):
        return v
    if cfg.lambda_ is not None:
        L = _lambda_fn(cfg.lambda_)
        v.notes.append("Lambda supplied by the user")
    else:
        def L(t):
            A = p.coefficients(t)[0]
            return -(A + A.conj().T) / 2
        v.notes.append("Lambda = -(A + A*)/2")

    def skew(t):
        S = L(t) + p.coefficients(t)[0]
        res = float(np.linalg.norm(S + S.conj().T))
        return res <= 1e-10 * (1.0 + float(np.linalg.norm(S))), f"|S + S*| = {res:.3g}"

    if not _sample(v, "Lambda + A skew", ts, skew):
        return v
    if not _sample(v, "Lambda in Omega_n", ts, _omega_test(L, tol)):
        return v
    if not _sample(v, "Lambda + Lambda* scalar", ts, _scalar_part_test(L)):
        return v

    def e(t):
        Lt = L(t)
        return -np.trace(Lt + Lt.conj().T).real / n

    system = TwoByTwoSystem(e, lambda t: nu_0(p.coefficients(t)[1], tol),
                            lambda t: np.trace(p.coefficients(t)[2]).real, 0.0, p.t0)
    return _delegate(v, system, cfg, p)


# ---------------------------------------------------------------- Sum/Sep family

def _alpha_candidates(cfg):
    if cfg.alpha is not None:
        beta = cfg.beta if cfg.beta is not None else ex.sub(ex.ONE, ex._lift(cfg.alpha))
        return [(cfg.alpha, beta)]
    return [(1.0, 0.0), (0.0, 1.0), (0.5, 0.5)]


def check_T3_7_and_C2_2(p, cfg=CriterionConfig()):
    """Sum-based reduction through a Hermitian ``H`` with ``B H = Sep(alpha A + beta A* + gamma I)``.

    ``Sum(M Z + Z M*) = 2 Re(c) Sum(Z)`` for ``M = A* + H B`` requires every
    column of ``M`` to sum to the same ``c``; that is checked as a hypothesis.
    Scalar system: ``a12 = lambda_1(B)/n`` (or ``nu_0``), ``a21 = -Sum K_H``,
    ``E = 2 Re c`` with ``K_H = H' + H B H + A* H + H A - C``.  When
    ``Sep(...)`` vanishes on the grid, ``H = 0`` and the verdict is reported
    under ``C2.2`` with the ``nu_0`` weight.
    """
    ts = cfg.grid(p)
    n = p.n
    tol = cfg.tol
    tried = []
    chosen = None
    for alpha, beta in _alpha_candidates(cfg):
        fa, _ = coefficient(alpha)
        fb, _ = coefficient(beta)
        fg, _ = coefficient(cfg.gamma)

        def sep_at(t, fa=fa, fb=fb, fg=fg):
            a, b = fa(t), fb(t)
            if abs(a + b - 1.0) > 1e-12:
                raise ArithmeticError(f"alpha + beta = {a + b!r} at t={t:g}")
            return separator(a_alpha_beta_gamma(p.coefficients(t)[0], a, b, fg(t)))

        try:
            seps = [sep_at(t) for t in ts]
        except _ERRORS as err:
            tried.append((alpha, f"Sep not evaluable: {err}"))
            continue
        vanishes = all(np.max(np.abs(S)) <= 1e-10 * (1.0 + float(np.max(np.abs(p.coefficients(t)[0]))))
                       for S, t in zip(seps, ts))

        if vanishes:
            H = lambda t: np.zeros((n, n), dtype=complex)
        else:
            @_memo
            def H(t, sep_at=sep_at):
                rep = solve_sep_matrices(p.coefficients(t)[1], sep_at(t), tol)
                if not rep.solved:
                    raise ArithmeticError(f"B X = Sep(...) has no Hermitian solution at t={t:g}")
                return rep.solution

        def colsum(t, H=H):
            A, B, _ = p.coefficients(t)
            return (A.conj().T + H(t) @ B).sum(axis=0)

        bad = None
        for t in ts:
            try:
                c = colsum(t)
            except _ERRORS as err:
                bad = (float(t), f"H unavailable: {err}")
                break
            spread = float(np.max(np.abs(c - c[0])))
            if spread > 1e-8 * (1.0 + float(np.max(np.abs(c)))):
                bad = (float(t), f"column sums of A* + H B differ by {spread:.3g}")
                break
        if bad is None:
            chosen = (alpha, beta, vanishes, H, colsum)
            break
        tried.append((alpha, f"{bad[1]} at t={bad[0]:g}"))

    if chosen is None:
        v = CriterionVerdict("T3.7")
        for alpha, why in tried:
            v.notes.append(f"alpha={alpha}: {why}")
        t_bad = None
        if tried and " at t=" in tried[-1][1]:
            try:
                t_bad = float(tried[-1][1].rsplit("t=", 1)[1])
            except ValueError:
                t_bad = None
        v.require("Hermitian H with uniform column sums of A* + H B", False,
                  tried[-1][1] if tried else "no candidate", t_bad)
        return v

    alpha, beta, vanishes, H, colsum = chosen
    v = CriterionVerdict("C2.2" if vanishes else "T3.7")
    v.notes.append(f"alpha={alpha}, beta={beta}, gamma={cfg.gamma}")
    v.notes.extend(f"alpha={a} rejected: {why}" for a, why in tried)
    v.require("Sep(alpha A + beta A* + gamma I) = 0" if vanishes else "B H = Sep(...) Hermitian solvable",
              True, f"sampled at {len(ts)} points")
    v.require("uniform column sums of A* + H B", True, f"sampled at {len(ts)} points")
    h = cfg.fd_step

    def a21(t):
        A, B, C = p.coefficients(t)
        Ht = H(t)
        dH = np.zeros_like(Ht) if vanishes else _central(H, t, h)
        K = dH + Ht @ B @ Ht + A.conj().T @ Ht + Ht @ A - C
        return -sum_entries(K).real

    def e(t):
        return 2.0 * colsum(t)[0].real

    weight = (lambda t: nu_0(p.coefficients(t)[1], tol)) if vanishes else _weight_fn(cfg, p)
    system = TwoByTwoSystem(e, weight, a21, 0.0, p.t0)
    return _delegate(v, system, cfg, p)


CHECKERS = (
    ("T1.1", check_T1_1),
    ("T3.1", check_T3_1),
    ("T3.2", check_T3_2),
    ("T3.3", check_T3_3),
    ("T3.4", check_T3_4),
    ("T3.5", check_T3_5),
    ("T3.6", check_T3_6),
    ("C3.1", check_C3_1),
    ("T3.7", check_T3_7_and_C2_2),
)


# ---------------------------------------------------------------- aggregate

@dataclass
class VerdictTable:
    problem: str
    verdicts: list
    zeros: object = None
    simulation_error: str = None
    flags: list = field(default_factory=list)

    def verdict(self, cid):
        return next(v for v in self.verdicts if v.criterion_id == cid
                    or (cid in ("T3.7", "C2.2") and v.criterion_id in ("T3.7", "C2.2")))

    def to_json(self):
        sim = {"error": self.simulation_error} if self.zeros is None else {
            "zeros": self.zeros.times,
            "horizon": [self.zeros.t0, self.zeros.T],
            "unconfirmed": [z.t for z in self.zeros.unconfirmed],
            "oscillation_observed": self.zeros.oscillation_observed,
        }
        return {
            "problem": self.problem,
            "criteria": [v.to_json() for v in self.verdicts],
            "simulation": sim,
            "flags": list(self.flags),
        }

    def to_text(self):
        lines = [f"problem: {self.problem}"]
        for v in self.verdicts:
            lines.append(f"  {v.criterion_id:<5} {v.summary()}")
        if self.zeros is not None:
            z = self.zeros
            shown = ", ".join(f"{t:.4f}" for t in z.times[:6])
            more = f" ... ({len(z.times)} total)" if len(z.times) > 6 else ""
            if z.times:
                lines.append(f"  simulation on [{z.t0:g}, {z.T:g}]: zeros {shown}{more}")
            else:
                lines.append(f"  simulation on [{z.t0:g}, {z.T:g}]: no zeros")
        elif self.simulation_error is not None:
            lines.append(f"  simulation failed: {self.simulation_error}")
        for flag in self.flags:
            lines.append(f"  FLAG {flag}")
        return "\n".join(lines)


def run_all(p, cfg=CriterionConfig(), simulate=True, init=None):
    """Every checker plus a direct simulation on the same horizon.

    A criterion that certifies oscillation while the simulation sees fewer
    than two zeros is flagged for review.  The converse is expected: the
    criteria are only sufficient.
    """
    verdicts = []
    for cid, check in CHECKERS:
        try:
            verdicts.append(check(p, cfg))
        except _ERRORS as err:
            v = CriterionVerdict(cid)
            v.require("evaluation", False, str(err), getattr(err, "t", None))
            verdicts.append(v)
    table = VerdictTable(p.label or "problem", verdicts)
    if simulate:
        try:
            _, zeros = simulate_oscillation(p, init, p.t0 + cfg.horizon)
            table.zeros = zeros
        except _ERRORS as err:
            table.simulation_error = str(err)
        if table.zeros is not None:
            for v in verdicts:
                if v.oscillatory and len(table.zeros.zeros) < 2:
                    table.flags.append(f"{v.criterion_id} certifies oscillation but the simulation found "
                                       f"{len(table.zeros.zeros)} zero(s)")
    return table
