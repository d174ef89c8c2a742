import io
import math

import numpy as np
import pytest

from hamosc import catalog
from hamosc.dynamics import (
    ConjoinedInitialData, check_correspondence_2_19, find_det_zeros, integrate_hamiltonian,
    integrate_matrix_riccati,
)
from hamosc.errors import NotHermitian, SchemaError
from hamosc.problem import HamiltonianProblem, MatrixFunction
from hamosc.scalar_riccati import ScalarRiccatiProblem, solve_scalar_riccati


def _const(A, B, C):
    return HamiltonianProblem(MatrixFunction.constant(A), MatrixFunction.constant(B, ("hermitian",)),
                              MatrixFunction.constant(C, ("hermitian",)))


def test_rotation_example_closed_form():
    p = catalog.get("example_3_1")
    traj = integrate_hamiltonian(p, t_end=10.0)
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    for t in np.linspace(0.0, 10.0, 11):
        rot = np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]])
        Phi, _ = traj.state(t)
        assert np.allclose(Phi, rot * math.cos(t), atol=1e-6)
        assert traj.det_at(t).real == pytest.approx(math.cos(t) ** 2, abs=1e-6)
    assert np.allclose(J, -J.T)
    assert traj.stats["max_conjoined_residual"] <= 1e-6


def test_uncoupled_oscillators():
    traj = integrate_hamiltonian(catalog.get("harmonic_n2"), t_end=6.0)
    for t in (1.0, 3.0, 6.0):
        assert np.allclose(traj.state(t)[0], math.cos(t) * np.eye(2), atol=1e-6)


def test_hyperbolic_growth_has_no_zeros():
    traj = integrate_hamiltonian(catalog.get("hyperbolic"), t_end=10.0)
    assert traj.det_at(3.0).real == pytest.approx(math.cosh(3.0) ** 2, rel=1e-6)
    assert find_det_zeros(traj).zeros == []


def test_double_zeros_found_as_dips():
    zeros = find_det_zeros(integrate_hamiltonian(catalog.get("example_3_1"), t_end=10.0))
    assert np.allclose(zeros.times, math.pi / 2 + math.pi * np.arange(3), atol=1e-6)
    assert all(z.kind == "dip" for z in zeros.zeros)
    assert all(z.width <= 1e-6 for z in zeros.zeros)


def test_simple_zeros_found_as_sign_changes():
    zeros = find_det_zeros(integrate_hamiltonian(catalog.get("harmonic_n1"), t_end=20.0))
    assert np.allclose(zeros.times, math.pi / 2 + math.pi * np.arange(6), atol=1e-8)
    assert all(z.kind.startswith("sign") for z in zeros.zeros)
    assert zeros.oscillation_observed


def test_complex_problem_zeros():
    # A = i [[0,1],[1,0]] commutes with B = I, C = -I: Phi = exp(A t) cos t
    zeros = find_det_zeros(integrate_hamiltonian(catalog.get("complex_skew"), t_end=10.0))
    assert np.allclose(zeros.times, math.pi / 2 + math.pi * np.arange(3), atol=1e-6)


def test_tighter_tolerance_keeps_confirmed_zeros():
    p = catalog.get("parametric")
    coarse = find_det_zeros(integrate_hamiltonian(p, t_end=40.0)).times
    fine = find_det_zeros(integrate_hamiltonian(p, t_end=40.0, rtol=5e-9)).times
    assert len(coarse) == len(fine) >= 2
    assert np.allclose(coarse, fine, atol=1e-5)


def test_initial_data_validation():
    with pytest.raises(NotHermitian):
        ConjoinedInitialData(2, Y0=np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(SchemaError):
        ConjoinedInitialData(2, Phi0=np.eye(3))
    init = ConjoinedInitialData.from_json({"Phi0": [[1, 0], [0, 2]], "Y0": [[1, {"re": 0, "im": 1}], [{"re": 0, "im": -1}, 0]]}, 2)
    assert np.allclose(init.Psi0, init.Y0 @ init.Phi0)


def test_trajectory_csv_columns():
    traj = integrate_hamiltonian(catalog.get("harmonic_n1"), t_end=1.0)
    buf = io.StringIO()
    traj.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,re_phi_00,im_phi_00,re_det,im_det"
    assert len(lines) == len(traj.ts) + 1


def test_scalar_matrix_riccati_blows_up_like_tangent():
    traj, rep = integrate_matrix_riccati(catalog.get("harmonic_n1"), t_end=3.0)
    assert rep.blew_up
    assert rep.t_star == pytest.approx(math.pi / 2, abs=1e-4)
    assert traj(1.0)[0, 0].real == pytest.approx(-math.tan(1.0), rel=1e-6)


def test_matrix_riccati_stays_zero_without_forcing():
    p = _const(np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)))
    traj, rep = integrate_matrix_riccati(p, t_end=5.0)
    assert not rep.blew_up
    assert np.allclose(traj(5.0), 0.0)


def test_diagonal_matrix_riccati_decouples():
    a, b, c = np.array([0.3, -0.2]), np.array([1.0, 2.0]), np.array([-0.5, -1.5])
    p = _const(np.diag(a), np.diag(b), np.diag(c))
    Y0 = np.diag([0.1, -0.2])
    # the second entry blows up near t = 0.72
    traj, rep = integrate_matrix_riccati(p, Y0, t_end=0.4)
    assert not rep.blew_up
    for k in range(2):
        # y' + b y^2 + 2 a y - c = 0
        scalar, _ = solve_scalar_riccati(ScalarRiccatiProblem(b[k], 2 * a[k], -c[k], Y0[k, k]), 0.4)
        for t in (0.1, 0.25, 0.4):
            assert traj(t)[k, k].real == pytest.approx(scalar(t), rel=1e-6)
    assert abs(traj(0.4)[0, 1]) == 0.0


def test_matrix_riccati_keeps_hermitian():
    p = catalog.get("complex_skew")
    traj, _ = integrate_matrix_riccati(p, np.array([[0.5, 0.2j], [-0.2j, 0.1]]), t_end=1.0)
    for Y in traj.Ys:
        assert np.abs(Y - Y.conj().T).max() <= 1e-12
    assert traj.max_antihermitian <= 1e-6


def test_correspondence_on_rotation_example():
    rep = check_correspondence_2_19(catalog.get("example_3_1"), t_end=4.0)
    assert rep.passed
    assert rep.first_zero == pytest.approx(math.pi / 2, abs=1e-6)
    assert rep.blowup_time == pytest.approx(math.pi / 2, abs=1e-3)


def test_correspondence_without_zeros():
    rep = check_correspondence_2_19(catalog.get("hyperbolic"), t_end=20.0)
    assert rep.passed and rep.first_zero is None and rep.blowup_time is None


def test_correspondence_matches_scalar_equation():
    p = catalog.get("euler_n1")
    rep = check_correspondence_2_19(p, t_end=8.0)
    assert rep.passed
    _, scalar = solve_scalar_riccati(ScalarRiccatiProblem(1.0, 0.0, "1/(2*t^2)", 0.0, 1.0), 8.0)
    assert rep.blowup_time == pytest.approx(scalar.t_star, abs=1e-4)
    assert rep.first_zero == pytest.approx(math.exp(math.pi / 2), abs=1e-6)
