import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from hamosc import matrix_core as mc
from hamosc.errors import DimensionMismatch, NotHermitian, NotPSD


def _random_hermitian(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (G + G.conj().T) / 2


def _bisection_eigenvalues(H):
    """Roots of det(H - x I) located on a Gershgorin grid and refined by bisection."""
    radius = np.abs(H).sum(axis=1).max()
    xs = np.linspace(-radius - 1, radius + 1, 20001)

    def char(x):
        return np.linalg.det(H - x * np.eye(len(H))).real

    vals = np.array([char(x) for x in xs])
    roots = [brentq(char, xs[k], xs[k + 1], xtol=1e-14)
             for k in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]]
    return np.array(roots)


def test_eigen_of_simple_matrices():
    assert np.allclose(mc.eigvalsh(np.diag([2.0, 1.0])), [1.0, 2.0])
    assert np.allclose(mc.eigvalsh([[0.0, 1.0], [1.0, 0.0]]), [-1.0, 1.0])


@pytest.mark.parametrize("seed", range(5))
def test_eigen_matches_characteristic_polynomial_oracle(seed):
    H = _random_hermitian(np.random.default_rng(seed), 4)
    oracle = _bisection_eigenvalues(H)
    assert len(oracle) == 4
    assert np.abs(mc.eigvalsh(H) - oracle).max() <= 1e-8


def test_eigen_reconstruction_and_orthonormality():
    H = _random_hermitian(np.random.default_rng(11), 6)
    spec = mc.hermitian_eigen(H)
    U = spec.vectors
    assert np.allclose(U.conj().T @ U, np.eye(6), atol=1e-12)
    assert np.allclose(spec.reconstruct(), H, atol=1e-12)
    assert np.all(np.diff(spec.values) >= 0)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        mc.hermitian_eigen([[1.0, 2.0], [0.0, 1.0]])


def test_cached_eigen_returns_independent_copies():
    H = np.diag([3.0, 1.0])
    first = mc.hermitian_eigen(H)
    first.values[0] = 99.0
    assert mc.hermitian_eigen(H).values[0] == pytest.approx(1.0)


def test_lambda_min():
    assert mc.lambda_min(np.diag([1.0, 2.0])) == pytest.approx(1.0)
    assert mc.lambda_min(np.eye(3)) == pytest.approx(1.0)
    assert mc.lambda_min([[2.0, 1.0], [1.0, 2.0]]) == pytest.approx(1.0)


def test_apply_functional():
    g = mc.PositiveFunctional.normalized_trace(2)
    assert mc.apply_functional(g, np.eye(2)) == pytest.approx(1.0)
    assert mc.apply_functional(g, np.diag([1.0, 3.0])) == pytest.approx(2.0)
    e1 = mc.PositiveFunctional.from_weight(np.diag([1.0, 0.0]))
    assert mc.apply_functional(e1, np.diag([5.0, 7.0])) == pytest.approx(5.0)
    with pytest.raises(DimensionMismatch):
        mc.apply_functional(g, np.eye(3))


def test_functional_weight_must_be_psd():
    with pytest.raises(NotPSD):
        mc.PositiveFunctional(np.diag([1.0, -1.0]))
    assert mc.PositiveFunctional.normalized_trace(3).normalized
    assert not mc.PositiveFunctional.trace(3).normalized


def test_nu_g_and_nu_0():
    assert mc.nu_g(mc.PositiveFunctional.trace(2), np.diag([1.0, 0.0])) == 0.0
    assert mc.nu_g(mc.PositiveFunctional.normalized_trace(2), np.eye(2)) == pytest.approx(1.0)
    assert mc.nu_g(mc.PositiveFunctional.trace(2), np.diag([1.0, 2.0])) == pytest.approx(2 / 3)
    assert mc.nu_0(np.diag([1.0, 0.0])) == 0.0
    assert mc.nu_0(np.eye(2)) == pytest.approx(0.5)
    assert mc.nu_0(np.diag([1.0, 2.0])) == pytest.approx(2 / 3)
    with pytest.raises(NotPSD):
        mc.nu_0(np.diag([1.0, -1.0]))


def test_sqrt_psd():
    assert np.allclose(mc.sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    assert np.allclose(mc.sqrt_psd(np.eye(2)), np.eye(2))
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    R = mc.sqrt_psd(M)
    assert np.linalg.norm(R @ R - M) <= 1e-9 * (1 + np.linalg.norm(M))
    assert np.allclose(np.linalg.eigvalsh(R), [1.0, np.sqrt(3.0)])


def test_sum_entries():
    assert mc.sum_entries(np.eye(3)) == 3
    assert mc.sum_entries([[1, 2], [3, 4]]) == 10
    assert mc.sum_entries(np.zeros((2, 2))) == 0


def test_separator_examples():
    assert np.allclose(mc.separator([[1.0, 2.0], [3.0, 4.0]]), np.diag([-4.0, -6.0]))
    assert np.allclose(mc.separator(np.zeros((3, 3))), 0.0)


def test_separator_identity_with_random_multipliers():
    rng = np.random.default_rng(3)
    n = 4
    L = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    K = L + mc.separator(L)
    c = 1j * mc.sum_entries(L).imag / n
    for _ in range(50):
        U = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        assert abs(mc.sum_entries(K @ U) - c * mc.sum_entries(U)) <= 1e-10 * (1 + np.linalg.norm(U))


def test_matrix_exp_examples():
    assert np.allclose(mc.matrix_exp(np.zeros((2, 2))), np.eye(2))
    assert np.allclose(mc.matrix_exp(np.diag([1.0, 2.0])), np.diag([np.e, np.e ** 2]))
    assert np.allclose(mc.matrix_exp([[0.0, 1.0], [0.0, 0.0]]), [[1.0, 1.0], [0.0, 1.0]])


def test_matrix_exp_matches_series_for_small_norm():
    rng = np.random.default_rng(8)
    for _ in range(10):
        M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        M /= np.linalg.norm(M, 2)
        series, term = np.eye(3, dtype=complex), np.eye(3, dtype=complex)
        for k in range(1, 30):
            term = term @ M / k
            series = series + term
        assert np.abs(mc.matrix_exp(M) - series).max() <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_eigen_reconstruction_property(n, seed):
    H = _random_hermitian(np.random.default_rng(seed), n)
    spec = mc.hermitian_eigen(H)
    assert np.abs(spec.reconstruct() - H).max() <= 1e-10 * (1 + np.abs(H).max())
