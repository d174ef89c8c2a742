import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from hamosc.errors import HypothesisNotSatisfied
from hamosc.scalar_riccati import (
    ScalarRiccatiProblem, TwoByTwoSystem, riccati_system_correspondence, solve_scalar_riccati,
    theorem_2_2_oscillation_check, verify_comparison_theorem_2_1, verify_lemma_2_2,
)
from hamosc.verdict import VerdictStatus


def test_tangent_blows_up_at_half_pi():
    traj, rep = solve_scalar_riccati(ScalarRiccatiProblem(1.0, 0.0, 1.0), 3.0)
    assert rep.blew_up and rep.direction == "-inf"
    assert rep.t_star == pytest.approx(math.pi / 2, abs=1e-4)
    for t in (0.3, 0.9, 1.4):
        assert traj(t) == pytest.approx(-math.tan(t), rel=1e-6)


def test_decaying_solution_exists_on_whole_interval():
    traj, rep = solve_scalar_riccati(ScalarRiccatiProblem(1.0, 0.0, 0.0, 1.0), 10.0)
    assert rep.status == "ExistsOnWholeInterval"
    assert traj(10.0) == pytest.approx(1 / 11, rel=1e-7)


def test_zero_coefficients_keep_constant():
    traj, rep = solve_scalar_riccati(ScalarRiccatiProblem(0.0, 0.0, 0.0, 5.0), 4.0)
    assert not rep.blew_up and traj(4.0) == pytest.approx(5.0)


def test_expression_coefficients():
    p = ScalarRiccatiProblem("1", "0", "1/(4*(1+t)^2)", 0.5)
    traj, rep = solve_scalar_riccati(p, 5.0)
    # y = 1/(2(1+t)) solves y' + y^2 + 1/(4(1+t)^2) = 0
    assert traj(5.0) == pytest.approx(1 / 12, rel=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 10.0))
def test_nonnegative_data_never_blow_up(a, y0):
    traj, rep = solve_scalar_riccati(ScalarRiccatiProblem(a, 0.0, 0.0, y0), 20.0)
    assert rep.status == "ExistsOnWholeInterval"
    assert traj(20.0) == pytest.approx(y0 / (1 + a * y0 * 20.0), rel=1e-6, abs=1e-10)


def test_correspondence_rebuilds_cosine():
    sys = TwoByTwoSystem(0.0, 1.0, -1.0, 0.0)
    traj, _ = solve_scalar_riccati(sys.riccati(0.0), 1.5)
    res = riccati_system_correspondence(sys, traj)
    assert res.residual <= 1e-6
    assert np.allclose(res.phi, np.cos(res.ts), atol=1e-6)
    assert np.allclose(res.psi, -np.sin(res.ts), atol=1e-6)


def test_correspondence_with_vanishing_free_term():
    sys = TwoByTwoSystem(0.3, 1.0, 0.0, 0.0)
    traj, _ = solve_scalar_riccati(sys.riccati(0.0), 2.0)
    res = riccati_system_correspondence(sys, traj)
    assert np.allclose(res.psi, 0.0)
    assert np.allclose(res.phi, np.exp(0.3 * res.ts), rtol=1e-8)


def test_correspondence_against_matrix_exponential():
    M = np.array([[0.2, 1.5], [-0.7, -0.1]])
    sys = TwoByTwoSystem(*M.ravel())
    traj, _ = solve_scalar_riccati(sys.riccati(0.4), 1.0)
    res = riccati_system_correspondence(sys, traj)
    for t, phi, psi in zip(res.ts, res.phi, res.psi):
        ref = expm(M * t) @ np.array([1.0, 0.4])
        assert abs(ref[0] - phi) + abs(ref[1] - psi) <= 1e-6 * (1 + np.abs(ref).sum())


def test_harmonic_system_is_oscillatory():
    v = theorem_2_2_oscillation_check(TwoByTwoSystem(0.0, 1.0, -1.0, 0.0), horizon=50.0)
    assert v.status is VerdictStatus.OSCILLATORY
    for tr in v.traces:
        assert np.allclose(tr.values, tr.checkpoints)
    zeros = np.array(v.auxiliary["simulation_zeros"])
    assert np.allclose(zeros, math.pi / 2 + math.pi * np.arange(len(zeros)), atol=1e-4)


def test_vanishing_coupling_is_inconclusive():
    v = theorem_2_2_oscillation_check(TwoByTwoSystem(0.0, 1.0, 0.0, 0.0))
    assert v.status is VerdictStatus.INCONCLUSIVE
    assert np.allclose(v.traces[1].values, 0.0)


def test_negative_weight_is_not_applicable():
    v = theorem_2_2_oscillation_check(TwoByTwoSystem(0.0, -1.0, -1.0, 0.0))
    assert v.status is VerdictStatus.NOT_APPLICABLE


def test_euler_system_stays_inconclusive_though_it_oscillates():
    """``-int a21`` converges for ``a21 = -1/(2 t^2)``, so the test cannot fire."""
    sys = TwoByTwoSystem(0.0, 1.0, "-1/(2*t^2)", 0.0, t0=1.0)
    v = theorem_2_2_oscillation_check(sys, horizon=1e4 - 1.0)
    assert v.status is VerdictStatus.INCONCLUSIVE
    assert v.traces[1].values[-1] == pytest.approx(0.5 * (1 - 1e-4), rel=1e-6)
    # phi = sqrt(t) (cos(ln t / 2) - sin(ln t / 2)) vanishes at exp(pi/2 + 2 k pi)
    zeros = v.auxiliary["simulation_zeros"]
    assert np.allclose(zeros, [math.exp(math.pi / 2), math.exp(math.pi / 2 + 2 * math.pi)], rtol=1e-6)


def test_time_varying_drift_uses_nested_integrals():
    sys = TwoByTwoSystem("0.1*cos(t)", 1.0, -1.0, 0.0)
    v = theorem_2_2_oscillation_check(sys, horizon=100.0, simulate=False)
    assert v.status is VerdictStatus.OSCILLATORY
    w = v.traces[0]
    t = w.checkpoints[-1]
    # the weight exp(-0.1 sin t) averages to I0(0.1)
    assert w.value_at_T / t == pytest.approx(1.0025, abs=0.02)


def test_comparison_identical_equations():
    p = ScalarRiccatiProblem(1.0, 0.0, "-1", 0.0)
    rep = verify_comparison_theorem_2_1(p, ScalarRiccatiProblem(1.0, 0.0, "-1", 0.0), 3.0)
    assert rep.passed and rep.min_gap == pytest.approx(0.0, abs=1e-6)


def test_comparison_smaller_free_term():
    first = ScalarRiccatiProblem(1.0, 0.2, "cos(t)", 0.0)
    second = ScalarRiccatiProblem(1.0, 0.2, "cos(t) - 1", 0.0)
    rep = verify_comparison_theorem_2_1(first, second, 1.2)
    assert rep.passed and rep.min_gap >= -1e-6


def test_comparison_negative_quadratic_coefficient():
    with pytest.raises(HypothesisNotSatisfied):
        verify_comparison_theorem_2_1(ScalarRiccatiProblem(1.0, 0.0, 0.0), ScalarRiccatiProblem(-1.0, 0.0, 0.0), 1.0)


def test_integral_equation_ordering():
    rep = verify_lemma_2_2(1.0, "2 + t", "1 + t", 0.0, 5.0)
    assert rep.passed and rep.min_gap > 0


def test_integral_equation_linear_case():
    rep = verify_lemma_2_2(0.0, "2 + t", "1 + t", 0.0, 5.0)
    assert rep.passed and rep.min_gap == pytest.approx(1.0, rel=1e-8)


def test_integral_equation_tiny_gap():
    rep = verify_lemma_2_2(1.0, "1 + t + 1e-9", "1 + t", 0.0, 2.0)
    assert rep.passed


def test_integral_equation_requires_ordering():
    with pytest.raises(HypothesisNotSatisfied):
        verify_lemma_2_2(1.0, "1 + t", "2 + t", 0.0, 5.0)
