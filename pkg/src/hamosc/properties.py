"""Seeded property suites for the matrix inequalities the criteria rely on.

Each suite draws random instances, evaluates both sides of one inequality or
identity, and records the worst margin.  A failing instance is kept in a
JSON-friendly form so it can be replayed.  Suites call through the module
objects (``mc.separator`` and friends), so a patched primitive is exercised
exactly as the library would use it.
"""
from dataclasses import dataclass, field
import json
import time

import numpy as np

from . import matrix_core as mc


@dataclass
class Outcome:
    ok: bool
    margin: float
    sample: dict


@dataclass
class SuiteResult:
    name: str
    statement: str
    cases: int
    failures: int = 0
    worst_margin: float = float("inf")
    counterexample: dict = None
    seconds: float = 0.0

    @property
    def passed(self):
        return self.failures == 0

    def to_json(self):
        return {"name": self.name, "statement": self.statement, "cases": self.cases,
                "failures": self.failures, "worst_margin": self.worst_margin,
                "counterexample": self.counterexample, "seconds": self.seconds}


def encode(value):
    """Arrays and complex numbers as nested ``[re, im]`` lists."""
    if isinstance(value, np.ndarray):
        return {"re": value.real.tolist(), "im": value.imag.tolist()}
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def decode(value):
    if isinstance(value, dict) and set(value) == {"re", "im"}:
        return np.array(value["re"]) + 1j * np.array(value["im"])
    return value


# ---------------------------------------------------------------- generators

def _dim(rng):
    return int(rng.integers(2, 7))


def _scale(rng):
    return 10.0 ** rng.uniform(-1.0, 0.5)


def _general(rng, n):
    return _scale(rng) * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def _hermitian(rng, n):
    G = _general(rng, n)
    return (G + G.conj().T) / 2


def _psd(rng, n, allow_singular=True):
    """``G G*`` with a random rank; singular about a third of the time."""
    rank = n
    if allow_singular and rng.random() < 1 / 3:
        rank = int(rng.integers(0, n))
    G = _scale(rng) * (rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank)))
    return mc.hermitian_part(G @ G.conj().T)


def _pd(rng, n):
    # eigenvalues spread over four decades
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    lam = 10.0 ** rng.uniform(-2.0, 2.0, n)
    return mc.hermitian_part((Q * lam) @ Q.conj().T)


def _functional(rng, n, normalized):
    kind = rng.integers(0, 3)
    if kind == 0:
        W = np.eye(n, dtype=complex)
    elif kind == 1:
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        W = np.outer(v, v.conj())
    else:
        W = _psd(rng, n, allow_singular=False)
    return mc.PositiveFunctional.from_weight(W, normalize=normalized)


# ---------------------------------------------------------------- suites

def trace_commutation(rng):
    n = _dim(rng)
    M1, M2 = _general(rng, n), _general(rng, n)
    gap = abs(np.trace(M1 @ M2) - np.trace(M2 @ M1))
    tol = 1e-10 * max(1.0, np.linalg.norm(M1) * np.linalg.norm(M2))
    return Outcome(gap <= tol, tol - gap, {"M1": M1, "M2": M2})


def trace_diagonal_bound(rng):
    n = _dim(rng)
    S, H = _general(rng, n), _psd(rng, n)
    lhs = np.trace(S @ H @ S.conj().T).real
    re = np.trace((S + S.conj().T) / 2).real
    im = np.trace((S - S.conj().T) / 2j).real
    rhs = mc.lambda_min(H) / n * (re ** 2 + im ** 2)
    margin = lhs - rhs + 1e-9
    return Outcome(margin >= 0, margin, {"S": S, "H": H})


def functional_quadratic_bound(rng):
    n = _dim(rng)
    M = _general(rng, n)
    if rng.random() < 1 / 3:
        M[:, 0] = M[:, 1]
    H = _psd(rng, n)
    g = _functional(rng, n, normalized=rng.random() < 0.5)
    lhs = mc.apply_functional(g, M.conj().T @ H @ M).real
    rhs = mc.nu_g(g, H) * abs(mc.apply_functional(g, M)) ** 2
    margin = lhs - rhs + 1e-9 * (1.0 + abs(lhs))
    return Outcome(margin >= 0, margin, {"M": M, "H": H, "W": g.weight})


def functional_eigen_bounds(rng):
    n = _dim(rng)
    D = _psd(rng, n)
    g = _functional(rng, n, normalized=True)
    lam = mc.eigvalsh(D)
    val = mc.apply_functional(g, D).real
    tol = 1e-9 * (1.0 + lam[-1])
    margin = min(val - lam[0], lam[-1] - val) + tol
    return Outcome(margin >= 0, margin, {"D": D, "W": g.weight})


def nu_g_chain(rng):
    """``nu_g(B) <= lambda_1(B) <= tr B`` for weights ``W >= I``.

    For a normalised weight only ``nu_g(B) <= lambda_n(B) <= tr B`` is
    guaranteed; both chains are checked on the same ``B``.
    """
    n = _dim(rng)
    B = _psd(rng, n)
    lam = mc.eigvalsh(B)
    tr = np.trace(B).real
    heavy = mc.PositiveFunctional(np.eye(n) + _psd(rng, n) * rng.random(), "I + P")
    light = _functional(rng, n, normalized=True)
    tol = 1e-9 * (1.0 + lam[-1])
    margin = min(lam[0] - mc.nu_g(heavy, B), tr - lam[0],
                 lam[-1] - mc.nu_g(light, B), tr - lam[-1]) + tol
    return Outcome(margin >= 0, margin, {"B": B, "W_heavy": heavy.weight, "W_normalized": light.weight})


def nu_0_bounds(rng):
    n = _dim(rng)
    B = _pd(rng, n)
    lam1 = mc.lambda_min(B)
    tinv = np.trace(np.linalg.inv(B)).real
    tol = 1e-9 * max(1.0, lam1)
    margin = min(lam1 - 1.0 / tinv, n / tinv - lam1) + tol
    return Outcome(margin >= 0, margin, {"B": B})


def sum_sep_identity(rng, trials=50):
    n = _dim(rng)
    L = _general(rng, n)
    K = L + mc.separator(L)
    c = 1j * mc.sum_entries(L).imag / n
    worst = np.inf
    bad = None
    for _ in range(trials):
        U = _general(rng, n)
        gap = abs(mc.sum_entries(K @ U) - c * mc.sum_entries(U))
        tol = 1e-10 * (1.0 + np.linalg.norm(L) * np.linalg.norm(U)) * n
        if tol - gap < worst:
            worst, bad = tol - gap, U
    return Outcome(worst >= 0, worst, {"L": L, "U": bad})


def sum_quadratic(rng):
    n = _dim(rng)
    Y, B = _hermitian(rng, n), _psd(rng, n)
    lhs = mc.sum_entries(Y @ B @ Y).real
    rhs = mc.lambda_min(B) / n * mc.sum_entries(Y).real ** 2
    margin = lhs - rhs + 1e-9
    return Outcome(margin >= 0, margin, {"Y": Y, "B": B})


def separator_shape(rng):
    n = _dim(rng)
    L = _general(rng, n)
    if rng.random() < 0.5:
        L = L.real.astype(complex)
    S = mc.separator(L)
    res = mc.hermitian_residual(S)
    tol = 1e-12 * (1.0 + np.linalg.norm(L))
    margin = tol - res
    if not np.any(L.imag):
        off = np.abs(S - np.diag(np.diag(S))).max() + np.abs(S.imag).max()
        margin = min(margin, tol - off)
    return Outcome(margin >= 0, margin, {"L": L})


SUITES = {
    "trace_commutation": (trace_commutation, "tr(M1 M2) = tr(M2 M1)"),
    "trace_diagonal_bound": (trace_diagonal_bound, "tr(S H S*) >= lambda_1(H)/n ([tr Re S]^2 + [tr Im S]^2)"),
    "functional_quadratic_bound": (functional_quadratic_bound, "g(M* H M) >= nu_g(H) |g(M)|^2"),
    "functional_eigen_bounds": (functional_eigen_bounds, "lambda_1(D) <= g(D) <= lambda_n(D), g normalised"),
    "nu_g_chain": (nu_g_chain, "nu_g(B) <= lambda_1(B) <= tr B for W >= I"),
    "nu_0_bounds": (nu_0_bounds, "1/tr(B^-1) <= lambda_1(B) <= n/tr(B^-1)"),
    "sum_sep_identity": (sum_sep_identity, "Sum([L + Sep L] U) = i Im(Sum L)/n Sum(U)"),
    "sum_quadratic": (sum_quadratic, "Sum(Y B Y) >= lambda_1(B)/n (Sum Y)^2"),
    "separator_shape": (separator_shape, "Sep(L) Hermitian; real diagonal for real L"),
}


def run_suite(name, seed=0, cases=200):
    fn, statement = SUITES[name]
    index = list(SUITES).index(name)
    rng = np.random.default_rng([seed, index])
    result = SuiteResult(name, statement, cases)
    start = time.perf_counter()
    for k in range(cases):
        out = fn(rng)
        if out.margin < result.worst_margin:
            result.worst_margin = float(out.margin)
        if not out.ok:
            result.failures += 1
            if result.counterexample is None:
                result.counterexample = {"suite": name, "seed": seed, "case": k, "margin": float(out.margin),
                                         "sample": {key: encode(v) for key, v in out.sample.items()}}
    result.seconds = time.perf_counter() - start
    return result


def run_all_suites(seed=0, cases=200, names=None):
    return [run_suite(name, seed, cases) for name in (names or SUITES)]


def write_counterexample(result, path):
    with open(path, "w") as fh:
        json.dump(result.counterexample, fh, indent=2)
