"""Scalar expressions in one variable ``t``.

Grammar (usual precedence, ``^`` binds tightest and associates to the right)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := ('-' | '+') unary | power
    power := atom ('^' unary)?
    atom  := number | 'pi' | 'e' | 't' | func '(' expr ')' | '(' expr ')'

Expressions are immutable trees that can be printed back to source,
evaluated, and differentiated symbolically.
"""
from dataclasses import dataclass
from functools import lru_cache
import math
import re

from .errors import DomainError, ExprSyntaxError, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}


class Expr:
    __slots__ = ()

    def __str__(self):
        return to_source(self)

    # operator sugar for building trees in code
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __neg__(self):
        return neg(self)

    def __pow__(self, other):
        return power(self, _lift(other))


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Const(Expr):
    name: str


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


T = Var()
ZERO = Num(0.0)
ONE = Num(1.0)


def _lift(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, str):
        return parse_expr(x)
    return Num(float(x))


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            start = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {source[start]!r}", start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.peek()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos, [value])
        self.take()

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos, ["+", "-", "*", "/", "^", "end"])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^", self.peek()[2]):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "t":
                return T
            if text in CONSTANTS:
                return Const(text)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise UnknownIdentifier(f"unknown identifier {text!r}", pos, ("t", "pi", "e") + FUNCTIONS)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", pos, ["number", "t", "pi", "e", "(", "-"] + list(FUNCTIONS))


@lru_cache(maxsize=4096)
def parse_expr(source):
    """Parse ``source`` into an :class:`Expr` tree.

    >>> to_source(parse_expr("t^2 - 1"))
    't^2 - 1.0'
    """
    if not isinstance(source, str):
        raise TypeError("expression source must be a string")
    return _Parser(source).parse()


# ---------------------------------------------------------------- printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(e):
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Num) and (e.value < 0 or math.copysign(1.0, e.value) < 0):
        return 0
    return 5


def _fmt_num(x):
    if x.is_integer() and abs(x) < 1e15:
        return f"{x:.1f}"
    return repr(x)


def to_source(e):
    """Render ``e`` so that ``parse_expr`` rebuilds an equal tree."""
    if isinstance(e, Num):
        s = _fmt_num(abs(e.value)) if e.value == e.value else "nan"
        return f"(-{s})" if math.copysign(1.0, e.value) < 0 else s
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Call):
        return f"{e.fn}({to_source(e.arg)})"
    if isinstance(e, Neg):
        inner = to_source(e.arg)
        return f"-{inner}" if _prec(e.arg) >= 3 else f"-({inner})"
    p = _PREC[e.op]
    left, right = to_source(e.left), to_source(e.right)
    if e.op == "^":
        if _prec(e.left) <= 4:
            left = f"({left})"
        if _prec(e.right) < 3:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    sep = " " if p == 1 else ""
    return f"{left}{sep}{e.op}{sep}{right}"


# ---------------------------------------------------------------- evaluation

def _pow(a, b):
    if a < 0 and not float(b).is_integer():
        raise ValueError("fractional power of a negative number")
    if a == 0 and b < 0:
        raise ZeroDivisionError("zero to a negative power")
    return math.pow(a, b)


def _to_python(e):
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Const):
        return repr(CONSTANTS[e.name])
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Neg):
        return f"(-{_to_python(e.arg)})"
    if isinstance(e, Call):
        fn = "abs" if e.fn == "abs" else f"_m.{e.fn}"
        return f"{fn}({_to_python(e.arg)})"
    left, right = _to_python(e.left), _to_python(e.right)
    if e.op == "^":
        return f"_pow({left}, {right})"
    return f"({left} {e.op} {right})"


@lru_cache(maxsize=4096)
def compile_expr(e):
    """Compile ``e`` into a plain Python function of ``t``."""
    code = f"lambda t: {_to_python(e)}"
    return eval(code, {"_m": math, "_pow": _pow, "abs": abs})


def eval_expr(e, t):
    """Evaluate ``e`` at ``t``; raises :class:`DomainError` outside its domain."""
    try:
        value = float(compile_expr(e)(float(t)))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(f"cannot evaluate {to_source(e)}: {exc}", t=t) from None
    if not math.isfinite(value):
        raise DomainError(f"non-finite value of {to_source(e)}", t=t)
    return value


# ---------------------------------------------------------------- construction with folding

def _is_num(e, value=None):
    return isinstance(e, Num) and (value is None or e.value == value)


def _fold(op, a, b):
    try:
        value = {"+": a + b, "-": a - b, "*": a * b}[op] if op in "+-*" else None
        if op == "/":
            value = a / b
        elif op == "^":
            value = _pow(a, b)
    except (ValueError, ZeroDivisionError, OverflowError):
        return None
    return Num(value) if math.isfinite(value) else None


def add(a, b):
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    if _is_num(a) and _is_num(b):
        return _fold("+", a.value, b.value) or BinOp("+", a, b)
    if isinstance(b, Neg):
        return sub(a, b.arg)
    return BinOp("+", a, b)


def sub(a, b):
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return neg(b)
    if _is_num(a) and _is_num(b):
        return _fold("-", a.value, b.value) or BinOp("-", a, b)
    return BinOp("-", a, b)


def neg(a):
    if isinstance(a, Num):
        return Num(-a.value) if a.value != 0.0 else ZERO
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a, b):
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if _is_num(a, -1.0):
        return neg(b)
    if _is_num(b, -1.0):
        return neg(a)
    if _is_num(a) and _is_num(b):
        return _fold("*", a.value, b.value) or BinOp("*", a, b)
    return BinOp("*", a, b)


def div(a, b):
    if _is_num(a, 0.0):
        return ZERO
    if _is_num(b, 1.0):
        return a
    if _is_num(a) and _is_num(b):
        return _fold("/", a.value, b.value) or BinOp("/", a, b)
    return BinOp("/", a, b)


def power(a, b):
    if _is_num(b, 1.0):
        return a
    if _is_num(b, 0.0):
        return ONE
    if _is_num(a) and _is_num(b):
        return _fold("^", a.value, b.value) or BinOp("^", a, b)
    return BinOp("^", a, b)


def call(fn, a):
    return Call(fn, a)


def has_t(e):
    if isinstance(e, Var):
        return True
    if isinstance(e, (Num, Const)):
        return False
    if isinstance(e, (Neg, Call)):
        return has_t(e.arg)
    return has_t(e.left) or has_t(e.right)


# ---------------------------------------------------------------- differentiation

@lru_cache(maxsize=4096)
def diff_expr(e):
    """Symbolic derivative with respect to ``t``."""
    if not has_t(e):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Neg):
        return neg(diff_expr(e.arg))
    if isinstance(e, Call):
        u = e.arg
        du = diff_expr(u)
        outer = {
            "sin": lambda: call("cos", u),
            "cos": lambda: neg(call("sin", u)),
            "tan": lambda: div(ONE, power(call("cos", u), Num(2.0))),
            "exp": lambda: e,
            "log": lambda: div(ONE, u),
            "sqrt": lambda: div(ONE, mul(Num(2.0), e)),
            "sinh": lambda: call("cosh", u),
            "cosh": lambda: call("sinh", u),
            "abs": lambda: div(u, e),
        }[e.fn]()
        return mul(outer, du)
    a, b = e.left, e.right
    da, db = diff_expr(a), diff_expr(b)
    if e.op == "+":
        return add(da, db)
    if e.op == "-":
        return sub(da, db)
    if e.op == "*":
        return add(mul(da, b), mul(a, db))
    if e.op == "/":
        return div(sub(mul(da, b), mul(a, db)), power(b, Num(2.0)))
    # e.op == "^"
    if not has_t(b):
        return mul(mul(b, power(a, sub(b, ONE))), da)
    return mul(e, add(mul(db, call("log", a)), div(mul(b, da), a)))
