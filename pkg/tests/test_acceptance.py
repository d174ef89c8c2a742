"""Acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the terminal summary.
"""
import math
import time

import numpy as np

from hamosc import catalog, expr as ex, matrix_core as mc
from hamosc.criteria import CriterionConfig, check_T3_1, check_T3_2, check_T3_5, run_all
from hamosc.dynamics import check_correspondence_2_19
from hamosc.matrix_equations import (
    a_alpha_beta_gamma, h_lambda_by_quadrature, solve_bx_eq_a, solve_lyapunov, solve_sep_matrices,
)
from hamosc.problem import HamiltonianProblem, MatrixFunction
from hamosc.properties import SUITES, run_all_suites
from hamosc.scalar_riccati import (
    ScalarRiccatiProblem, TwoByTwoSystem, solve_scalar_riccati, theorem_2_2_oscillation_check,
)
from hamosc.verdict import VerdictStatus

OSC, INC, NA = VerdictStatus.OSCILLATORY, VerdictStatus.INCONCLUSIVE, VerdictStatus.NOT_APPLICABLE


def test_rotation_example_reproduction(acceptance):
    p = catalog.get("example_3_1")
    start = time.perf_counter()
    table = run_all(p, CriterionConfig())
    seconds = time.perf_counter() - start
    expected = np.pi / 2 + np.pi * np.arange(6)
    found = np.array(table.zeros.times[:6])
    err = np.abs(found - expected).max() if len(found) == 6 else math.inf
    t11, t34 = table.verdict("T1.1").status, table.verdict("T3.4").status
    ok = t11 is INC and t34 is OSC and err <= 1e-4 and seconds < 5.0
    acceptance(1, "rotation example", ok,
               f"T1.1={t11.value} T3.4={t34.value} zero err={err:.1e} time={seconds:.2f}s")
    assert t11 is INC
    assert t34 is OSC
    assert err <= 1e-4
    assert seconds < 5.0


def test_singular_b_example_reproduction(acceptance):
    p = catalog.get("example_3_2")
    cfg = CriterionConfig()
    start = time.perf_counter()
    v1, v2, v5 = check_T3_1(p, cfg), check_T3_2(p, cfg), check_T3_5(p, cfg)
    seconds = time.perf_counter() - start
    witnesses = [v.failed_hypothesis for v in (v1, v2)]
    rank_ok = all(w is not None and "rank B = 1, rank (B|A) = 2" in w.evidence for w in witnesses)
    tr = v5.trace("J_2")
    idx = np.linspace(0, len(tr.checkpoints) - 1, 10).astype(int)
    m = 1
    gap = float(np.abs(tr.values[idx] - m * (tr.checkpoints[idx] - p.t0)).max())
    ok = v1.status is NA and v2.status is NA and rank_ok and gap <= 1e-6 and seconds < 5.0
    acceptance(2, "singular-B example", ok, f"J2 gap={gap:.1e} time={seconds:.2f}s")
    assert v1.status is NA and v2.status is NA
    assert rank_ok
    assert gap <= 1e-6
    assert seconds < 5.0


def _random_entry(rng):
    c = rng.uniform(-1.0, 1.0, 4).tolist()
    w = float(rng.uniform(0.2, 3.0))
    return ex.parse_expr(f"{c[0]!r}*sin({w!r}*t) + {c[1]!r}*t/(1+t) + {c[2]!r} + {c[3]!r}*exp(-t)")


def test_sep_vanishing_family(acceptance):
    rng = np.random.default_rng(33)
    worst = 0.0
    for branch in catalog.BRANCHES:
        a = [[_random_entry(rng) for _ in range(3)] for _ in range(3)]
        s = float(rng.uniform(-1.0, 1.0))
        A0 = [[ex.parse_expr(repr(s * v)) for v in row] for row in ([0, 1, -1], [-1, 0, 1], [1, -1, 0])]
        A = catalog.build_a_q(branch, a, A0)
        alpha = catalog.ALPHA[branch]
        for t in rng.uniform(0.0, 50.0, 50):
            S = mc.separator(a_alpha_beta_gamma(A(t), alpha, 1.0 - alpha, 0.0))
            worst = max(worst, float(np.abs(S).max()))
    ok = worst <= 1e-10
    acceptance(3, "Sep vanishes on every branch", ok, f"max |Sep| = {worst:.1e}")
    assert ok


def test_property_suites(acceptance):
    start = time.perf_counter()
    results = run_all_suites(seed=0, cases=200)
    seconds = time.perf_counter() - start
    failed = [r.name for r in results if not r.passed]
    ok = not failed and seconds < 30.0 and len(results) == len(SUITES)
    acceptance(4, "property suites", ok, f"{len(results)} suites x 200 cases, failed={failed}, time={seconds:.1f}s")
    assert not failed
    assert seconds < 30.0


def test_riccati_correspondence(acceptance):
    rng = np.random.default_rng(5)
    worst_gap = worst_res = 0.0
    failures = with_zero = 0
    for _ in range(30):
        n = int(rng.integers(1, 4))
        G, H = rng.standard_normal((n, n)), rng.standard_normal((n, n))
        A = 0.5 * rng.standard_normal((n, n))
        B = G @ G.T + 0.5 * np.eye(n)
        C = -(H @ H.T + 0.5 * np.eye(n))
        p = HamiltonianProblem(MatrixFunction.constant(A), MatrixFunction.constant(B, ("hermitian",)),
                               MatrixFunction.constant(C, ("hermitian",)))
        r = check_correspondence_2_19(p, t_end=8.0)
        # a strong drift A can leave det Phi zero-free; then neither side may report one
        failures += not r.passed
        with_zero += r.first_zero is not None
        worst_gap = max(worst_gap, r.time_gap)
        worst_res = max(worst_res, r.residual)
    ok = failures == 0 and worst_gap <= 1e-3 and worst_res <= 1e-5
    acceptance(5, "Riccati blow-up vs det zero", ok, f"{with_zero}/30 with a zero, worst gap={worst_gap:.1e} residual={worst_res:.1e}")
    assert failures == 0
    assert with_zero >= 25
    assert worst_gap <= 1e-3 and worst_res <= 1e-5


def test_catalog_soundness(acceptance):
    assert len(catalog.ENTRIES) >= 8
    bad = []
    for e in catalog.ENTRIES:
        table = run_all(e.problem(), CriterionConfig())
        assert table.zeros is not None, e.name
        few = len(table.zeros.zeros) < 2
        for v in table.verdicts:
            if v.oscillatory and (few or e.name == "hyperbolic"):
                bad.append(f"{e.name}:{v.criterion_id}")
    ok = not bad
    acceptance(6, "catalog soundness", ok, f"{len(catalog.ENTRIES)} problems, violations={bad}")
    assert ok


def _rand_pd(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return mc.hermitian_part(G @ G.conj().T + 0.3 * np.eye(n))


def _rand_herm(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return mc.hermitian_part(G)


def test_solver_cross_validation(acceptance):
    rng = np.random.default_rng(7)
    worst_gap = 0.0
    residual_ok = True
    for _ in range(50):
        n = int(rng.integers(1, 5))
        B, R = _rand_pd(rng, n), _rand_herm(rng, n)
        rep = solve_lyapunov(B, R)
        H = h_lambda_by_quadrature(B, R)
        worst_gap = max(worst_gap, float(np.abs(rep.solution - H).max()))
        residual_ok &= rep.residual <= 1e-8 * (1 + np.linalg.norm(R))
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        rep = solve_bx_eq_a(B, A)
        residual_ok &= rep.solved and rep.residual <= 1e-8 * (1 + np.linalg.norm(A))
        # singular but consistent: A in the range of B
        P = _rand_pd(rng, n)
        P[:, 0] = 0
        P[0, :] = 0
        rep = solve_bx_eq_a(P, P @ A)
        residual_ok &= rep.solved and rep.residual <= 1e-8 * (1 + np.linalg.norm(P @ A))
        rep = solve_sep_matrices(B, 2.0 * R)
        if rep.solved:
            residual_ok &= rep.residual <= 1e-8 * (1 + np.linalg.norm(2.0 * R))
    ok = worst_gap <= 1e-6 and residual_ok
    acceptance(7, "Lyapunov solver vs quadrature", ok, f"worst gap={worst_gap:.1e}")
    assert worst_gap <= 1e-6
    assert residual_ok


def test_scalar_sanity(acceptance):
    _, rep = solve_scalar_riccati(ScalarRiccatiProblem(1.0, 0.0, 1.0, 0.0), 3.0)
    blow = abs(rep.t_star - np.pi / 2) if rep.blew_up else math.inf
    v = theorem_2_2_oscillation_check(TwoByTwoSystem(0.0, 1.0, -1.0, 0.0), horizon=20.0)
    zeros = np.array(v.auxiliary["simulation_zeros"])
    expected = np.pi / 2 + np.pi * np.arange(len(zeros))
    zerr = float(np.abs(zeros - expected).max()) if len(zeros) else math.inf
    ok = blow <= 1e-4 and v.status is OSC and len(zeros) == 6 and zerr <= 1e-4
    acceptance(8, "scalar sanity", ok, f"blow-up err={blow:.1e} T2.2={v.status.value} zero err={zerr:.1e}")
    assert blow <= 1e-4
    assert v.status is OSC
    assert len(zeros) == 6 and zerr <= 1e-4
