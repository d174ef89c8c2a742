"""Scalar Riccati equations and the 2x2 linear systems behind them.

``y' + a y^2 + b y + c = 0`` is tied to

    phi' = a11 phi + a12 psi
    psi' = a21 phi + a22 psi

through ``y = psi / phi``, giving ``y' + a12 y^2 + (a11 - a22) y - a21 = 0``.
A zero of ``phi`` is a blow-up of ``y``.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq

from . import expr as ex
from ._ode import integrate
from .calculus import Quadrature, classify_trace, cumulative_integral, default_checkpoints
from .config import DEFAULT
from .errors import HamoscError, HypothesisNotSatisfied, NumericalBreakdown, StepUnderflow
from .verdict import CriterionVerdict


def coefficient(value):
    """Turn an Expr, source string, number or callable into ``(fn, expr_or_None)``."""
    if callable(value) and not isinstance(value, ex.Expr):
        return value, None
    e = ex._lift(value)
    if not ex.has_t(e):
        c = ex.eval_expr(e, 0.0)
        return (lambda t: c), e
    return (lambda t: ex.eval_expr(e, t)), e


@dataclass
class ScalarRiccatiProblem:
    """``y' + a(t) y^2 + b(t) y + c(t) = 0`` with ``y(t0) = y0``."""

    a: object
    b: object
    c: object
    y0: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        self._a, self._ea = coefficient(self.a)
        self._b, self._eb = coefficient(self.b)
        self._c, self._ec = coefficient(self.c)

    def rhs(self, t, y):
        return -(self._a(t) * y * y + self._b(t) * y + self._c(t))


@dataclass
class BlowUpReport:
    status: str
    max_existence_right_end: float
    t_star: float = None
    direction: str = None
    bracket: tuple = None

    @property
    def blew_up(self):
        return self.status == "BlowUp"

    def to_json(self):
        doc = {"status": self.status, "max_existence_right_end": self.max_existence_right_end}
        if self.blew_up:
            doc.update(t_star=self.t_star, direction=self.direction, bracket=list(self.bracket))
        return doc


@dataclass
class RiccatiTrajectory:
    ts: np.ndarray
    ys: np.ndarray
    solution: object = field(repr=False)

    def __call__(self, t):
        return float(np.real(self.solution(t)[0]))


def solve_scalar_riccati(p, t_end, rtol=DEFAULT.ode_rtol, atol=DEFAULT.ode_atol,
                         blowup=DEFAULT.blowup, max_step=np.inf):
    """Integrate a scalar Riccati problem up to ``t_end`` or its blow-up.

    Blow-up is declared once ``|y|`` exceeds ``blowup``.  Near a pole
    ``y ~ 1 / (a (t* - t))`` so ``t* - t ~ |y / y'|``, which gives a bracket of
    width about ``2 / (a * blowup)``.
    """
    if not t_end > p.t0:
        raise ValueError("t_end must exceed t0")
    last = {"t": p.t0, "y": p.y0}

    def f(t, y):
        return np.array([p.rhs(t, y[0])])

    def stop(t, y):
        last["t"], last["y"] = t, float(y[0])
        return abs(y[0]) > blowup

    try:
        sol = integrate(f, p.t0, np.array([float(p.y0)]), t_end, rtol=rtol, atol=atol,
                        max_step=max_step, stop=stop)
    except StepUnderflow as err:
        if abs(last["y"]) < math.sqrt(blowup):
            raise NumericalBreakdown(f"step underflow at t={err.t:g} with |y|={abs(last['y']):.3g}") from None
        t_s = last["t"]
        report = BlowUpReport("BlowUp", err.t, err.t, "+inf" if last["y"] > 0 else "-inf", (t_s, err.t))
        return None, report
    traj = RiccatiTrajectory(sol.ts, sol.ys[:, 0].real, sol)
    if not sol.stopped:
        return traj, BlowUpReport("ExistsOnWholeInterval", float(t_end))
    t_s, y_s = float(sol.ts[-1]), float(sol.ys[-1, 0].real)
    slope = abs(p.rhs(t_s, y_s))
    gap = abs(y_s) / slope if slope > 0 else 0.0
    t_star = t_s + gap
    report = BlowUpReport("BlowUp", t_star, t_star, "+inf" if y_s > 0 else "-inf", (t_s, t_s + 2 * gap))
    return traj, report


# ---------------------------------------------------------------- 2x2 systems

@dataclass
class TwoByTwoSystem:
    """Real 2x2 system ``phi' = a11 phi + a12 psi, psi' = a21 phi + a22 psi``."""

    a11: object
    a12: object
    a21: object
    a22: object
    t0: float = 0.0

    def __post_init__(self):
        self._f = [coefficient(v) for v in (self.a11, self.a12, self.a21, self.a22)]

    def matrix(self, t):
        (f11, _), (f12, _), (f21, _), (f22, _) = self._f
        return np.array([[f11(t), f12(t)], [f21(t), f22(t)]])

    def E(self, t):
        return self._f[0][0](t) - self._f[3][0](t)

    def a12_at(self, t):
        return self._f[1][0](t)

    def a21_at(self, t):
        return self._f[2][0](t)

    @property
    def E_vanishes(self):
        """Structural when both diagonal entries are expressions, else sampled."""
        e11, e22 = self._f[0][1], self._f[3][1]
        if e11 is not None and e22 is not None:
            return e11 == e22
        return all(abs(self.E(t)) <= 1e-14 for t in self.t0 + np.linspace(0.0, 10.0, 16))

    def riccati(self, y0=0.0):
        """The associated ``y' + a12 y^2 + E y - a21 = 0``."""
        return ScalarRiccatiProblem(self._f[1][0], self.E, lambda t: -self.a21_at(t), y0, self.t0)

    def simulate(self, t_end, phi0=1.0, psi0=0.0, rtol=DEFAULT.ode_rtol, atol=DEFAULT.ode_atol, max_step=0.25):
        return integrate(lambda t, y: self.matrix(t) @ y, self.t0, np.array([phi0, psi0], dtype=float),
                         t_end, rtol=rtol, atol=atol, max_step=max_step)


def sign_change_zeros(sol, component=0, xtol=1e-12):
    """Zeros of one real component of an ODE solution, refined on the dense output."""
    values = sol.ys[:, component].real
    zeros = []
    for k in range(len(values) - 1):
        v0, v1 = values[k], values[k + 1]
        if v0 == 0.0:
            zeros.append(float(sol.ts[k]))
        elif v0 * v1 < 0:
            g = lambda t: float(sol(t)[component].real)
            zeros.append(brentq(g, sol.ts[k], sol.ts[k + 1], xtol=xtol))
    return zeros


@dataclass
class CorrespondenceResult:
    ts: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    residual: float


def riccati_system_correspondence(sys, traj, phi0=1.0, y_cap=1e3, quad=Quadrature(rtol=1e-12, atol=1e-13)):
    """Rebuild ``(phi, psi)`` from a Riccati solution.

    ``phi = phi0 exp(int (a11 + a12 y))`` and ``psi = y phi``.  The residual is
    measured against a direct integration of the linear system and only on
    grid points where ``|y| <= y_cap``: close to a pole the product ``y phi``
    carries no accuracy.
    """
    keep = np.abs(traj.ys) <= y_cap
    cut = len(keep) if keep.all() else int(np.argmin(keep))
    ts = traj.ts[:max(cut, 2)]
    f11, f12 = sys._f[0][0], sys._f[1][0]
    logs, _, _ = cumulative_integral(lambda t: f11(t) + f12(t) * traj(t), ts, quad)
    phi = phi0 * np.exp(np.asarray(logs, dtype=float))
    y = np.array([traj(t) for t in ts])
    psi = y * phi
    if len(ts) < 2 or ts[-1] <= ts[0]:
        return CorrespondenceResult(ts, phi, psi, 0.0)
    direct = sys.simulate(ts[-1], phi0, y[0] * phi0, rtol=1e-11, atol=1e-13)
    ref = np.array([direct(t) for t in ts])
    err = np.abs(ref[:, 0] - phi) + np.abs(ref[:, 1] - psi)
    residual = float(np.max(err / (1.0 + np.abs(ref[:, 0]) + np.abs(ref[:, 1]))))
    return CorrespondenceResult(ts, phi, psi, residual)


# ---------------------------------------------------------------- oscillation test

def weighted_integrals(sys, ts, quad=Quadrature()):
    """``int a12 exp(-int E)`` and ``-int a21 exp(int E)`` on the grid ``ts``.

    Inner integrals start at ``ts[0]``.  Constant coefficients use the closed
    form.  With ``E = 0`` this is plain
    quadrature; otherwise the nested integrals ride along one ODE, which stops
    once the exponential weight leaves floating range (later checkpoints are
    NaN and the trace is then undetermined).
    """
    t0, T = float(ts[0]), float(ts[-1])
    exprs = [e for _, e in sys._f]
    if all(e is not None and not ex.has_t(e) for e in exprs):
        a12, a21, E = sys.a12_at(t0), sys.a21_at(t0), sys.E(t0)
        x = np.asarray(ts, dtype=float) - t0
        if E == 0.0:
            return a12 * x, -a21 * x
        return a12 * -np.expm1(-E * x) / E, -a21 * np.expm1(E * x) / E
    if sys.E_vanishes:
        w1, _, _ = cumulative_integral(sys.a12_at, ts, quad)
        w2, _, _ = cumulative_integral(lambda t: -sys.a21_at(t), ts, quad)
        return np.asarray(w1, dtype=float), np.asarray(w2, dtype=float)

    def f(t, s):
        e = s[0]
        return np.array([sys.E(t), sys.a12_at(t) * math.exp(-e), -sys.a21_at(t) * math.exp(e)])

    stop = lambda t, s: abs(s[0]) > 700.0 or not np.all(np.isfinite(s))
    sol = integrate(f, t0, np.zeros(3), T, rtol=max(quad.rtol, 1e-9), atol=1e-12, stop=stop)
    vals = np.array([sol(t) if t <= sol.ts[-1] else np.full(3, np.nan) for t in ts])
    return vals[:, 1], vals[:, 2]


def theorem_2_2_oscillation_check(sys, horizon=DEFAULT.horizon, theta=None, window=DEFAULT.window,
                                  checkpoints=DEFAULT.checkpoints, simulate=True, criterion_id="T2.2",
                                  quad=Quadrature()):
    """Leighton-type test for a 2x2 system.

    Hypotheses: ``a12 >= 0`` on the sampled grid, and both
    ``int a12 exp(-int E)`` and ``-int a21 exp(int E)`` diverge.  Conclusion:
    the system is oscillatory.  A doubled ``a12`` factor in the weight is read
    as a single one.
    """
    verdict = CriterionVerdict(criterion_id)
    verdict.notes.append("weight read as a12 exp(-int E), inner integrals from t0")
    ts = default_checkpoints(sys.t0, sys.t0 + horizon, checkpoints)
    try:
        a12 = np.array([sys.a12_at(t) for t in ts])
    except HamoscError as err:
        verdict.require("a12 evaluable", False, str(err), getattr(err, "t", None))
        return verdict
    k = int(np.argmin(a12))
    if not verdict.require("a12(t) >= 0", a12[k] >= -1e-14, f"min a12 = {a12[k]:.6g}", float(ts[k])):
        return verdict
    try:
        w1, w2 = weighted_integrals(sys, ts, quad)
    except (HamoscError, ArithmeticError) as err:
        verdict.require("weighted integrals computable", False, str(err), getattr(err, "t", None))
        return verdict
    verdict.traces.append(classify_trace(ts, w1, theta, window, name="int a12 exp(-int E)"))
    verdict.traces.append(classify_trace(ts, w2, theta, window, name="-int a21 exp(int E)"))
    if simulate:
        try:
            sol = sys.simulate(ts[-1])
            verdict.auxiliary["simulation_zeros"] = sign_change_zeros(sol)
        except HamoscError as err:
            verdict.auxiliary["simulation_error"] = str(err)
    return verdict


# ---------------------------------------------------------------- verification harnesses

@dataclass
class ComparisonReport:
    passed: bool
    interval_end: float
    min_gap: float
    violations: list = field(default_factory=list)
    condition_min: float = float("nan")

    def to_json(self):
        return {"passed": self.passed, "interval_end": self.interval_end, "min_gap": self.min_gap,
                "violations": self.violations[:10], "condition_min": self.condition_min}


def _sample_min(fn, ts):
    vals = np.array([fn(t) for t in ts])
    k = int(np.argmin(vals))
    return vals[k], float(ts[k])


def verify_comparison_theorem_2_1(first, second, t_end, lam=None, samples=200, tol=1e-6):
    """Numerically check the comparison statement for two Riccati equations.

    ``first`` carries ``(a, b, c)`` and ``y0(t1)``; ``second`` carries
    ``(a1, b1, c1)`` and ``y1(t1)``.  The inequality solution ``eta_0`` is
    ``y0`` itself and ``eta_1`` solves ``eta' + b1 eta + c1 = 0`` from
    ``y1(t1)`` (valid since ``a1 >= 0``); ``lam`` defaults to ``y1(t1)``.
    The hypothesis integral uses ``+`` where the source display shows ``=``.
    """
    t1 = first.t0
    grid = np.linspace(t1, t_end, samples)
    amin, at = _sample_min(second._a, grid)
    if amin < 0:
        raise HypothesisNotSatisfied("a1(t) >= 0", at)
    if second.y0 < first.y0:
        raise HypothesisNotSatisfied("y1(t1) >= y0(t1)", t1)
    lam = second.y0 if lam is None else lam
    if not first.y0 <= lam <= second.y0:
        raise HypothesisNotSatisfied("lambda in [y0(t1), eta1(t1)]", t1)

    def f(t, s):
        y0, eta1, e, _ = s
        a, b, c = first._a(t), first._b(t), first._c(t)
        a1, b1, c1 = second._a(t), second._b(t), second._c(t)
        return np.array([
            -(a * y0 * y0 + b * y0 + c),
            -(b1 * eta1 + c1),
            a1 * (y0 + eta1) + b1,
            math.exp(e) * ((a - a1) * y0 * y0 + (b - b1) * y0 + c - c1),
        ])

    stop = lambda t, s: abs(s[0]) > DEFAULT.blowup
    joint = integrate(f, t1, np.array([first.y0, second.y0, 0.0, 0.0]), t_end, stop=stop)
    end = float(joint.ts[-1])
    grid = joint.ts
    cond = lam - first.y0 + joint.ys[:, 3].real
    k = int(np.argmin(cond))
    if cond[k] < -tol:
        raise HypothesisNotSatisfied("weighted comparison integral >= 0", float(grid[k]))
    traj1, rep1 = solve_scalar_riccati(second, end)
    if rep1.blew_up and rep1.t_star < end - tol:
        report = ComparisonReport(False, end, float("-inf"), [(rep1.t_star, "y1 blew up")], float(cond[k]))
        return report
    gaps = np.array([traj1(t) - joint(t)[0].real for t in grid if abs(joint(t)[0]) < 1e6])
    violations = [(float(t), float(g)) for t, g in zip(grid, gaps) if g < -tol]
    return ComparisonReport(not violations, end, float(np.min(gaps)), violations, float(cond[k]))


def verify_lemma_2_2(a, e, e1, t0, t_end, samples=200, strict_tol=0.0, tol=1e-7):
    """Check that a smaller free term in the integral Riccati equation lifts the solution.

    Both ``y + int a y^2 + e = 0`` and its ``e1`` counterpart are solved in
    differential form ``y' + a y^2 + e' = 0`` with ``y(t0) = -e(t0)``.
    Returns a :class:`ComparisonReport`; ``min_gap`` is ``min(y1 - y0)``.
    """
    fa, _ = coefficient(a)
    ee, ee1 = ex._lift(e), ex._lift(e1)
    grid = np.linspace(t0, t_end, samples)
    amin, at = _sample_min(fa, grid)
    if amin < 0:
        raise HypothesisNotSatisfied("a(t) >= 0", at)
    gap_min, gt = _sample_min(lambda t: ex.eval_expr(ee, t) - ex.eval_expr(ee1, t), grid)
    if gap_min <= 0:
        raise HypothesisNotSatisfied("e(t) > e1(t)", gt)
    e1_min, et = _sample_min(lambda t: ex.eval_expr(ee1, t), grid)
    if e1_min <= 0:
        raise HypothesisNotSatisfied("e1(t) > 0", et)
    de, de1 = ex.diff_expr(ee), ex.diff_expr(ee1)
    p0 = ScalarRiccatiProblem(fa, 0.0, de, -ex.eval_expr(ee, t0), t0)
    p1 = ScalarRiccatiProblem(fa, 0.0, de1, -ex.eval_expr(ee1, t0), t0)
    traj0, rep0 = solve_scalar_riccati(p0, t_end)
    end = rep0.max_existence_right_end
    traj1, rep1 = solve_scalar_riccati(p1, end)
    if rep1.blew_up and rep1.t_star < end - 1e-6:
        return ComparisonReport(False, end, float("-inf"), [(rep1.t_star, "y1 blew up")])
    pts = traj0.ts[np.abs(traj0.ys) < 1e6]
    gaps = np.array([traj1(t) - traj0(t) for t in pts])
    violations = [(float(t), float(g)) for t, g in zip(pts, gaps) if g <= strict_tol - tol]
    return ComparisonReport(not violations, end, float(np.min(gaps)), violations)
