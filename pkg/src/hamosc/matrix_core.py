"""Dense complex matrix primitives used by the oscillation criteria.

Matrices are plain ``numpy`` arrays of shape ``(n, n)``.  Everything here is a
pure function of its arguments.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .config import DEFAULT
from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD


def as_matrix(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def hermitian_residual(M):
    M = np.asarray(M)
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def is_hermitian(M, tol=DEFAULT.hermitian):
    return hermitian_residual(M) <= tol


def hermitian_part(M):
    return 0.5 * (M + M.conj().T)


@dataclass(frozen=True)
class EigenSpectrum:
    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self):
        U = self.vectors
        return (U * self.values) @ U.conj().T


def _check_hermitian(M, tol):
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    res = hermitian_residual(M)
    if res > tol * scale:
        raise NotHermitian(f"matrix is not Hermitian (residual {res:.3e})")


@lru_cache(maxsize=512)
def _eigen_cached(data, n, tol):
    return _jacobi(np.frombuffer(data, dtype=complex).reshape(n, n), tol)


def hermitian_eigen(M, tol=DEFAULT):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ascending eigenvalues and a unitary matrix whose columns are the
    matching eigenvectors.  Raises :class:`NotHermitian` for non-Hermitian
    input and :class:`NoConvergence` if ``tol.jacobi_sweeps`` sweeps do not
    annihilate the off-diagonal part.  Repeated inputs (a constant ``B(t)``
    sampled along a grid) hit a small cache.
    """
    M = np.ascontiguousarray(as_matrix(M))
    spec = _eigen_cached(M.tobytes(), M.shape[0], tol)
    return EigenSpectrum(spec.values.copy(), spec.vectors.copy(), spec.sweeps)


def _jacobi(M, tol):
    """Cyclic Jacobi sweeps on a Hermitian matrix."""
    M = as_matrix(M)
    _check_hermitian(M, tol.hermitian)
    n = M.shape[0]
    a = hermitian_part(M).copy()
    V = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if n == 1 or norm == 0.0:
        return EigenSpectrum(np.real(np.diag(a)).copy(), V, 0)
    eps = np.finfo(float).eps
    for sweep in range(1, tol.jacobi_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= eps * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= eps * eps * norm:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # phase factor makes the (p, q) entry real, then a real rotation zeroes it
                G = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ G
                a[idx, :] = G.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                V[:, idx] = V[:, idx] @ G
    else:
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off > 1e3 * eps * norm:
            raise NoConvergence(f"Jacobi iteration did not converge in {tol.jacobi_sweeps} sweeps")
        sweep = tol.jacobi_sweeps
    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    return EigenSpectrum(values[order].copy(), V[:, order].copy(), sweep)


def eigvalsh(M, tol=DEFAULT):
    return hermitian_eigen(M, tol).values


def lambda_min(M, tol=DEFAULT):
    return float(hermitian_eigen(M, tol).values[0])


def lambda_max(M, tol=DEFAULT):
    return float(hermitian_eigen(M, tol).values[-1])


def is_singular_psd(values, tol=DEFAULT):
    """Singularity rule for an ascending spectrum of a PSD matrix."""
    return values[0] <= tol.singular_rel * max(1.0, abs(values[-1]))


def _check_psd(values, tol):
    if values[0] < -1e-10 * max(1.0, abs(values[-1])):
        raise NotPSD(f"matrix is not positive semidefinite (lambda_1 = {values[0]:.3e})")


@dataclass(frozen=True)
class PositiveFunctional:
    """Positive linear functional ``g(M) = trace(W M)`` with ``W`` Hermitian PSD.

    ``normalized`` is true when ``trace(W) == 1``; only then does
    ``lambda_1(D) <= g(D) <= lambda_n(D)`` hold for PSD ``D``.
    """

    weight: np.ndarray
    name: str = "weight"

    def __post_init__(self):
        W = as_matrix(self.weight)
        if not is_hermitian(W, 1e-12 * max(1.0, float(np.max(np.abs(W))))):
            raise NotHermitian("functional weight must be Hermitian")
        _check_psd(eigvalsh(W), DEFAULT)
        object.__setattr__(self, "weight", W)

    @property
    def n(self):
        return self.weight.shape[0]

    @property
    def normalized(self):
        return abs(np.trace(self.weight).real - 1.0) <= 1e-12

    @classmethod
    def trace(cls, n):
        return cls(np.eye(n), "trace")

    @classmethod
    def normalized_trace(cls, n):
        return cls(np.eye(n) / n, "trace/n")

    @classmethod
    def from_weight(cls, W, normalize=False):
        W = as_matrix(W)
        if normalize:
            W = W / np.trace(W).real
        return cls(W, "weight")

    def __call__(self, M):
        return apply_functional(self, M)


def apply_functional(g, M):
    M = np.asarray(M, dtype=complex)
    if M.shape != g.weight.shape:
        raise DimensionMismatch(f"functional is {g.weight.shape}, matrix is {M.shape}")
    return complex(np.sum(g.weight.T * M))


def nu_g(g, M, tol=DEFAULT):
    """``0`` for singular PSD ``M``, else ``1 / g(M^{-1})``."""
    M = as_matrix(M)
    values = eigvalsh(M, tol)
    _check_psd(values, tol)
    if is_singular_psd(values, tol):
        return 0.0
    return 1.0 / apply_functional(g, np.linalg.inv(M)).real


def nu_0(M, tol=DEFAULT):
    """``0`` for singular PSD ``M``, else ``1 / trace(M^{-1})``."""
    M = as_matrix(M)
    return nu_g(PositiveFunctional.trace(M.shape[0]), M, tol)


def sqrt_psd(M, tol=DEFAULT):
    """Principal square root of a Hermitian PSD matrix."""
    spec = hermitian_eigen(M, tol)
    _check_psd(spec.values, tol)
    roots = np.sqrt(np.clip(spec.values, 0.0, None))
    U = spec.vectors
    R = (U * roots) @ U.conj().T
    return hermitian_part(R)


def sum_entries(L):
    return complex(np.sum(L))


def separator(L):
    """Hermitian separator ``Sep(L)`` built from column sums of ``L``.

    Diagonal entries are minus the column sums of ``Re L``; the last row (and,
    by conjugation, the last column) carries the imaginary column sums
    recentred by their mean.  All other entries are zero.
    """
    L = np.asarray(L, dtype=complex)
    n = L.shape[0]
    re_cols = L.real.sum(axis=0)
    im_cols = L.imag.sum(axis=0)
    im_total = L.imag.sum()
    H = np.diag(-re_cols).astype(complex)
    for k in range(n - 1):
        h = -1j * im_cols[k] + 1j * im_total / n
        H[n - 1, k] = h
        H[k, n - 1] = np.conj(h)
    return H


def matrix_exp(M):
    M = np.asarray(M, dtype=complex)
    if is_hermitian(M, 1e-14 * max(1.0, float(np.max(np.abs(M))))):
        spec = hermitian_eigen(M)
        U = spec.vectors
        return (U * np.exp(spec.values)) @ U.conj().T
    return scipy.linalg.expm(M)
