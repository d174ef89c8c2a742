"""Matrix-valued functions of ``t`` and the Hamiltonian problems built from them."""
from dataclasses import dataclass, field
from functools import lru_cache
import json
import math
import os

import numpy as np

from . import expr as ex
from .config import DEFAULT
from .errors import DomainError, HermitianViolation, SchemaError
from .matrix_core import hermitian_residual

FLAGS = ("hermitian", "real", "constant")


def _entry(value):
    if isinstance(value, ex.Expr):
        return value
    return ex.parse_expr(str(value))


@dataclass(frozen=True, eq=False)
class MatrixFunction:
    """``n x n`` complex matrix whose entries are ``re + i*im`` expression pairs."""

    entries: tuple
    flags: frozenset = frozenset()

    def __post_init__(self):
        rows = tuple(tuple((_entry(re), _entry(im)) for re, im in row) for row in self.entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise SchemaError("matrix entries must form a non-empty square grid")
        flags = frozenset(self.flags)
        unknown = flags - set(FLAGS)
        if unknown:
            raise SchemaError(f"unknown matrix flags {sorted(unknown)}")
        object.__setattr__(self, "entries", rows)
        if not any(ex.has_t(e) for row in rows for pair in row for e in pair):
            flags = flags | {"constant"}
        elif "constant" in flags:
            raise SchemaError("matrix declared constant but an entry depends on t")
        object.__setattr__(self, "flags", flags)
        object.__setattr__(self, "_fn", self._compile())
        object.__setattr__(self, "_const", None)

    # ------------------------------------------------------------ constructors
    @classmethod
    def from_strings(cls, rows, flags=()):
        """Build from a grid of strings; a cell may be ``"re"`` or ``(re, im)``."""
        grid = []
        for row in rows:
            cells = []
            for cell in row:
                if isinstance(cell, (tuple, list)):
                    cells.append((cell[0], cell[1]))
                else:
                    cells.append((cell, "0"))
            grid.append(cells)
        return cls(tuple(grid), frozenset(flags))

    @classmethod
    def constant(cls, M, flags=()):
        M = np.atleast_2d(np.asarray(M, dtype=complex))
        grid = [[(ex.Num(float(z.real)), ex.Num(float(z.imag))) for z in row] for row in M]
        extra = set(flags)
        if np.all(M.imag == 0):
            extra.add("real")
        return cls(tuple(map(tuple, grid)), frozenset(extra))

    @classmethod
    def identity(cls, n, scale=1.0):
        return cls.constant(scale * np.eye(n), ("hermitian",))

    # ------------------------------------------------------------ properties
    @property
    def n(self):
        return len(self.entries)

    @property
    def is_constant(self):
        return "constant" in self.flags

    @property
    def is_diagonal(self):
        zero = ex.Num(0.0)
        return all(
            self.entries[j][k] == (zero, zero)
            for j in range(self.n)
            for k in range(self.n)
            if j != k
        )

    @property
    def is_real_structurally(self):
        zero = ex.Num(0.0)
        return all(im == zero for row in self.entries for _, im in row)

    # ------------------------------------------------------------ evaluation
    def _compile(self):
        parts = []
        for row in self.entries:
            cells = []
            for re, im in row:
                r = ex._to_python(re)
                i = ex._to_python(im)
                cells.append(r if im == ex.Num(0.0) else f"complex({r}, {i})")
            parts.append("[" + ", ".join(cells) + "]")
        code = f"lambda t: [{', '.join(parts)}]"
        return eval(code, {"_m": math, "_pow": ex._pow, "abs": abs, "complex": complex})

    def __call__(self, t):
        return eval_matrix(self, t)

    def derivative(self):
        grid = tuple(
            tuple((ex.diff_expr(re), ex.diff_expr(im)) for re, im in row) for row in self.entries
        )
        flags = self.flags & {"hermitian", "real"}
        return MatrixFunction(grid, flags)

    def to_json(self):
        return {
            "entries": [[{"re": str(re), "im": str(im)} for re, im in row] for row in self.entries],
            "flags": sorted(self.flags),
        }


def eval_matrix(Mf, t):
    """Entrywise evaluation of a :class:`MatrixFunction` at ``t``."""
    if Mf._const is not None:
        return Mf._const.copy()
    try:
        M = np.array(Mf._fn(float(t)), dtype=complex)
    except (ValueError, ZeroDivisionError, OverflowError):
        M = None
    if M is None or not np.all(np.isfinite(M)):
        for j, row in enumerate(Mf.entries):
            for k, (re, im) in enumerate(row):
                try:
                    ex.eval_expr(re, t)
                    ex.eval_expr(im, t)
                except DomainError as err:
                    raise DomainError(str(err), t=t, entry=(j, k)) from None
        raise DomainError("non-finite matrix value", t=t)
    if Mf.is_constant:
        object.__setattr__(Mf, "_const", M.copy())
    return M


@dataclass(frozen=True, eq=False)
class HamiltonianProblem:
    """Coefficients ``(A, B, C)`` of ``Phi' = A Phi + B Psi, Psi' = C Phi - A* Psi``."""

    A: MatrixFunction
    B: MatrixFunction
    C: MatrixFunction
    t0: float = 0.0
    label: str = ""
    notes: str = ""
    horizon: float = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        dims = {self.A.n, self.B.n, self.C.n}
        if len(dims) != 1:
            raise SchemaError(f"A, B and C must share one dimension, got {sorted(dims)}")
        object.__setattr__(self, "t0", float(self.t0))

    @property
    def n(self):
        return self.A.n

    def coefficients(self, t):
        """``(A(t), B(t), C(t))``; the last few evaluations are memoised."""
        t = float(t)
        hit = self._cache.get(t)
        if hit is None:
            hit = (self.A(t), self.B(t), self.C(t))
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache[t] = hit
        return hit

    def sample_points(self, count=None, span=None):
        count = count or DEFAULT.sample_points
        span = DEFAULT.sample_span if span is None else span
        return self.t0 + np.linspace(0.0, span, count)

    @property
    def is_real(self):
        return all(M.is_real_structurally for M in (self.A, self.B, self.C))

    def validate(self, tol=DEFAULT):
        """Check Hermitian B and C (and every declared flag) by sampling."""
        for name, M in (("A", self.A), ("B", self.B), ("C", self.C)):
            check_hermitian = name in "BC" or "hermitian" in M.flags
            for t in self.sample_points(tol.sample_points, tol.sample_span):
                value = M(t)
                scale = max(1.0, float(np.max(np.abs(value))))
                res = hermitian_residual(value)
                if check_hermitian and res > tol.hermitian * scale:
                    raise HermitianViolation(name, float(t), res)
                if "real" in M.flags and np.max(np.abs(value.imag)) > tol.hermitian * scale:
                    raise SchemaError(f"matrix {name} declared real but has imaginary part at t={t:g}")
        return self

    def to_json(self):
        doc = {
            "n": self.n,
            "t0": self.t0,
            "label": self.label,
            "A": self.A.to_json(),
            "B": self.B.to_json(),
            "C": self.C.to_json(),
        }
        if self.notes:
            doc["notes"] = self.notes
        if self.horizon is not None:
            doc["horizon"] = self.horizon
        return doc


# ---------------------------------------------------------------- loading

_TOP_KEYS = {"n", "t0", "label", "A", "B", "C", "notes", "horizon"}


def matrix_from_json(doc, n, name="matrix"):
    if not isinstance(doc, dict) or "entries" not in doc:
        raise SchemaError(f"{name}: expected an object with 'entries'")
    extra = set(doc) - {"entries", "flags"}
    if extra:
        raise SchemaError(f"{name}: unknown keys {sorted(extra)}")
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != n or any(
        not isinstance(r, list) or len(r) != n for r in rows
    ):
        raise SchemaError(f"{name}: entries must be a {n}x{n} grid")
    grid = []
    for j, row in enumerate(rows):
        cells = []
        for k, cell in enumerate(row):
            if isinstance(cell, (str, int, float)):
                cell = {"re": str(cell)}
            if not isinstance(cell, dict) or "re" not in cell or set(cell) - {"re", "im"}:
                raise SchemaError(f"{name}[{j}][{k}]: expected {{'re': str, 'im': str}}")
            try:
                cells.append((ex.parse_expr(str(cell["re"])), ex.parse_expr(str(cell.get("im", "0")))))
            except ex.ExprSyntaxError as err:
                raise SchemaError(f"{name}[{j}][{k}]: {err}") from None
        grid.append(tuple(cells))
    flags = doc.get("flags", [])
    if not isinstance(flags, list):
        raise SchemaError(f"{name}: flags must be a list")
    return MatrixFunction(tuple(grid), frozenset(flags))


def problem_from_json(doc, tol=DEFAULT):
    if not isinstance(doc, dict):
        raise SchemaError("problem document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"unknown keys {sorted(unknown)}")
    for key in ("n", "A", "B", "C"):
        if key not in doc:
            raise SchemaError(f"missing required key {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= 16:
        raise SchemaError("n must be an integer in [1, 16]")
    t0 = doc.get("t0", 0.0)
    if not isinstance(t0, (int, float)) or isinstance(t0, bool):
        raise SchemaError("t0 must be a number")
    mats = {k: matrix_from_json(doc[k], n, k) for k in "ABC"}
    problem = HamiltonianProblem(
        mats["A"], mats["B"], mats["C"], t0=t0,
        label=str(doc.get("label", "")), notes=str(doc.get("notes", "")),
        horizon=doc.get("horizon"),
    )
    return problem.validate(tol)


def load_problem(source, tol=DEFAULT):
    """Load a problem from a JSON file path or an inline JSON document."""
    if isinstance(source, dict):
        return problem_from_json(source, tol)
    text = source
    if not source.lstrip().startswith("{"):
        if not os.path.exists(source):
            raise SchemaError(f"no such problem file: {source}")
        with open(source) as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON: {err}") from None
    return problem_from_json(doc, tol)


@lru_cache(maxsize=256)
def sqrt_diagonal(Mf):
    """Entrywise symbolic square root of a structurally diagonal real matrix."""
    zero = ex.Num(0.0)
    grid = []
    for j, row in enumerate(Mf.entries):
        cells = []
        for k, (re, im) in enumerate(row):
            cells.append((ex.call("sqrt", re) if j == k and re != zero else zero, zero))
        grid.append(tuple(cells))
    return MatrixFunction(tuple(grid), frozenset({"hermitian", "real"}))
