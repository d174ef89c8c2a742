"""Built-in problems: the worked examples plus a few scalar and matrix classics.

Each entry carries a provenance note.  The piecewise Sep-vanishing matrix is
split into three sub-problems, one per branch of the partition.
"""
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .errors import SchemaError
from .problem import HamiltonianProblem, MatrixFunction


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    summary: str
    notes: str
    build: object

    def problem(self):
        p = self.build()
        return HamiltonianProblem(p.A, p.B, p.C, p.t0, label=self.name, notes=self.notes, horizon=p.horizon)


# ---------------------------------------------------------------- A_Q family

BRANCHES = ("q1", "q2", "q3")
ALPHA = {"q1": 1.0, "q2": 0.0, "q3": 0.5}


def _sum(items, neg=False):
    out = items[0]
    for e in items[1:]:
        out = ex.add(out, e) if isinstance(out, ex.Expr) else out + e
    if neg:
        return ex.neg(out) if isinstance(out, ex.Expr) else -out
    return out


def build_a_q(branch, a, A0=None):
    """Matrix ``A_Q`` of the chosen branch from free entries ``a``.

    ``a`` is an ``n x n`` grid (numbers or expressions).  Only the entries the
    branch treats as free are read; the rest are filled so that the columns
    (``q1``), the rows (``q2``) or both (``q3``) sum to zero.  ``A0`` is the
    skew part added on the third branch.
    """
    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}")
    symbolic = any(isinstance(x, ex.Expr) for row in a for x in row)
    n = len(a)
    m = n - 1
    out = [[a[j][k] for k in range(n)] for j in range(n)]
    if branch == "q1":
        for k in range(n):
            out[m][k] = _sum([a[j][k] for j in range(m)], neg=True)
    elif branch == "q2":
        for j in range(n):
            out[j][m] = _sum([a[j][k] for k in range(m)], neg=True)
    else:
        # the row n-1 entry of the last column uses that row's own sum
        for j in range(m):
            out[j][m] = _sum([a[j][k] for k in range(m)], neg=True)
        for k in range(m):
            out[m][k] = _sum([a[j][k] for j in range(m)], neg=True)
        out[m][m] = _sum([a[j][k] for j in range(m) for k in range(m)])
        if A0 is not None:
            out = [[ex.add(out[j][k], A0[j][k]) if symbolic else out[j][k] + A0[j][k]
                    for k in range(n)] for j in range(n)]
    if symbolic:
        return MatrixFunction(tuple(tuple((ex._lift(x), ex.ZERO) for x in row) for row in out))
    return np.array(out, dtype=float)


_A33 = [
    ["0.2*sin(t)", "0.1", "0.2*cos(t)"],
    ["0.05", "-0.1", "0.1*t/(1+t)"],
    ["0.1", "-0.1*cos(t)", "0.15"],
]
_A0 = [["0", "0.1", "-0.1"], ["-0.1", "0", "0.1"], ["0.1", "-0.1", "0"]]


def _example_3_3(branch):
    def build():
        a = [[ex.parse_expr(s) for s in row] for row in _A33]
        A0 = [[ex.parse_expr(s) for s in row] for row in _A0]
        A = build_a_q(branch, a, A0)
        return HamiltonianProblem(A, MatrixFunction.identity(3), MatrixFunction.identity(3, -1.0))
    return build


_Q_NOTE = (
    "Sep-vanishing family, branch {b}: A = A_Q{i}(t){extra} with real entries a_jk(t), B = I, C = -I. "
    "On this branch alpha = {alpha:g}, beta = 1 - alpha, gamma = 0 make Sep(A_alpha,beta,gamma) vanish. "
    "The full construction switches branch on a measurable partition of [t0, oo); "
    "here each branch is a separate problem."
)


# ---------------------------------------------------------------- the rest

def _const(A, B, C, t0=0.0, horizon=None):
    def build():
        return HamiltonianProblem(
            MatrixFunction.constant(A), MatrixFunction.constant(B, ("hermitian",)),
            MatrixFunction.constant(C, ("hermitian",)), t0, horizon=horizon,
        )
    return build


_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _euler():
    return HamiltonianProblem(
        MatrixFunction.from_strings([["0"]]), MatrixFunction.from_strings([["1"]], ("hermitian",)),
        MatrixFunction.from_strings([["-1/(2*t^2)"]], ("hermitian",)), 1.0,
    )


def _parametric():
    return HamiltonianProblem(
        MatrixFunction.from_strings([["0", "0.2*sin(t)"], ["-0.2*sin(t)", "0"]]),
        MatrixFunction.from_strings([["1", "0"], ["0", "1 + 0.5*cos(t)^2"]], ("hermitian",)),
        MatrixFunction.from_strings([["-(1 + 0.3*cos(t))", "0"], ["0", "-1"]], ("hermitian",)),
    )


ENTRIES = [
    CatalogEntry(
        "example_3_1", "A = A0 skew, B = I, C = -A0^T A0",
        "Rotation example with A0 = [[0,1],[-1,0]]. T1.1 cannot certify it (its second trace "
        "stays constant) while T3.4 does. With Phi(0) = I, det Phi = cos^2 t.",
        _const(_J, np.eye(2), -_J.T @ _J),
    ),
    CatalogEntry(
        "example_3_2", "n = 2, m = 1, B = diag(1, 0), C = -I",
        "Singular-B example with n = 2, m = 1, A1 = A2 = 1. As usually stated it has C = I, "
        "but its claimed J2(t) = m (t - t0) needs C = -I, which this entry uses. "
        "See example_3_2_literal.",
        _const(np.array([[0.0, 1.0], [0.0, 1.0]]), np.diag([1.0, 0.0]), -np.eye(2)),
    ),
    CatalogEntry(
        "example_3_2_literal", "singular-B example as stated, C = +I",
        "Singular-B example with C = I taken literally. Then J2(t) = -m (t - t0) and no "
        "criterion certifies oscillation.",
        _const(np.array([[0.0, 1.0], [0.0, 1.0]]), np.diag([1.0, 0.0]), np.eye(2)),
    ),
] + [
    CatalogEntry(
        f"example_3_3_{b}", f"Sep-vanishing family, branch {b.upper()}, n = 3",
        _Q_NOTE.format(b=b.upper(), i=b[1], alpha=ALPHA[b],
                       extra=" + A0 (A0 skew with zero row and column sums)" if b == "q3" else ""),
        _example_3_3(b),
    )
    for b in BRANCHES
] + [
    CatalogEntry(
        "harmonic_n1", "phi'' + phi = 0 as a 1x1 system",
        "Scalar harmonic oscillator: A = 0, B = 1, C = -1. Zeros at pi/2 + k pi.",
        _const([[0.0]], [[1.0]], [[-1.0]]),
    ),
    CatalogEntry(
        "harmonic_n2", "two uncoupled harmonic oscillators",
        "A = 0, B = I, C = -I with n = 2; det Phi = cos^2 t.",
        _const(np.zeros((2, 2)), np.eye(2), -np.eye(2)),
    ),
    CatalogEntry(
        "hyperbolic", "non-oscillatory control, C = +I",
        "A = 0, B = I, C = I with n = 2; det Phi = cosh^2 t has no zeros. "
        "No criterion may certify oscillation here.",
        _const(np.zeros((2, 2)), np.eye(2), np.eye(2)),
    ),
    CatalogEntry(
        "euler_n1", "Euler equation phi'' + phi/(2 t^2) = 0 on [1, oo)",
        "Oscillatory (1/2 > 1/4), but with Phi(1) = 1, Psi(1) = 0 the zeros sit at "
        "t = exp(pi/2 + 2 k pi), so only t = 4.81 lies in [1, 201]. The integral of -C "
        "converges, so every criterion should stay Inconclusive.",
        _euler,
    ),
    CatalogEntry(
        "complex_skew", "complex skew-Hermitian A, B = I, C = -I",
        "A = [[0, i], [i, 0]] is skew-Hermitian, so the problem is complex. The first three "
        "criteria assume real coefficients and are not applicable.",
        _const(np.array([[0, 1j], [1j, 0]]), np.eye(2), -np.eye(2)),
    ),
    CatalogEntry(
        "parametric", "time-varying coefficients",
        "A = 0.2 sin(t) J, B = diag(1, 1 + 0.5 cos^2 t), C = -diag(1 + 0.3 cos t, 1).",
        _parametric,
    ),
]

_BY_NAME = {e.name: e for e in ENTRIES}
FAMILIES = {"example_3_3": [f"example_3_3_{b}" for b in BRANCHES]}


def names():
    return [e.name for e in ENTRIES]


def entry(name):
    try:
        return _BY_NAME[name]
    except KeyError:
        raise SchemaError(f"unknown catalog problem {name!r}") from None


def get(name):
    return entry(name).problem()


def describe(name):
    """Plain-text description of an entry or of a family such as ``example_3_3``."""
    if name in FAMILIES:
        lines = [
            f"{name}: A_Q family, n = 3",
            "  Q1: rows 1..n-1 free, last row = minus the column sums (alpha = 1)",
            "  Q2: columns 1..n-1 free, last column = minus the row sums (alpha = 0)",
            "  Q3: both, corner = sum of the free block, plus a skew A0 (alpha = 1/2)",
            "  alpha is piecewise constant over the partition Q1, Q2, Q3; gamma = 0.",
            "  free entries a_jk(t):",
        ]
        lines += ["    " + "  ".join(f"{s:>12}" for s in row) for row in _A33]
        lines += [f"  branches: {', '.join(FAMILIES[name])}"]
        return "\n".join(lines)
    e = entry(name)
    p = e.problem()
    lines = [f"{e.name}: {e.summary}", f"  n = {p.n}, t0 = {p.t0:g}", f"  {e.notes}"]
    for key in "ABC":
        M = getattr(p, key)
        lines.append(f"  {key}:")
        for row in M.entries:
            cells = [ex.to_source(re) if im == ex.ZERO else f"{ex.to_source(re)} + i*({ex.to_source(im)})"
                     for re, im in row]
            lines.append("    [" + ", ".join(cells) + "]")
    return "\n".join(lines)
