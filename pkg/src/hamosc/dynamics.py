"""Direct simulation of the Hamiltonian system and of its matrix Riccati equation.

Simulation is ground truth on a finite horizon only: a zero count says what
happened on ``[t0, T]``, nothing about ``t -> infinity``.
"""
import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ._ode import integrate
from .config import DEFAULT
from .errors import NotHermitian, SchemaError, StepUnderflow
from .matrix_core import as_matrix, hermitian_part, hermitian_residual
from .scalar_riccati import BlowUpReport


@dataclass
class ConjoinedInitialData:
    """``Phi(t0) = Phi0``, ``Psi(t0) = Y0 Phi0`` with Hermitian ``Y0``."""

    n: int
    Phi0: np.ndarray = None
    Y0: np.ndarray = None

    def __post_init__(self):
        self.Phi0 = np.eye(self.n, dtype=complex) if self.Phi0 is None else as_matrix(self.Phi0)
        self.Y0 = np.zeros((self.n, self.n), dtype=complex) if self.Y0 is None else as_matrix(self.Y0)
        if self.Phi0.shape != (self.n, self.n) or self.Y0.shape != (self.n, self.n):
            raise SchemaError(f"initial data must be {self.n}x{self.n}")
        if hermitian_residual(self.Y0) > 1e-12 * max(1.0, float(np.max(np.abs(self.Y0)))):
            raise NotHermitian("Y0 must be Hermitian")
        self.Y0 = hermitian_part(self.Y0)
        P, Q = self.Phi0, self.Psi0
        if np.linalg.norm(P.conj().T @ Q - Q.conj().T @ P) > 1e-12 * (1.0 + np.linalg.norm(P) * np.linalg.norm(Q)):
            raise SchemaError("initial data are not conjoined")

    @property
    def Psi0(self):
        return self.Y0 @ self.Phi0

    @classmethod
    def from_json(cls, doc, n):
        def grid(key):
            if key not in doc:
                return None
            rows = doc[key]
            try:
                return np.array([[complex(c["re"], c.get("im", 0.0)) if isinstance(c, dict) else complex(c)
                                  for c in row] for row in rows])
            except (TypeError, ValueError, KeyError) as err:
                raise SchemaError(f"{key}: {err}") from None
        return cls(n, grid("Phi0"), grid("Y0"))


def _split(y, n):
    return y[:n], y[n:]


def conjoined_residual(Phi, Psi):
    return float(np.linalg.norm(Phi.conj().T @ Psi - Psi.conj().T @ Phi))


def hamiltonian_rhs(p):
    n = p.n

    def f(t, y):
        A, B, C = p.coefficients(t)
        Phi, Psi = y[:n], y[n:]
        return np.vstack([A @ Phi + B @ Psi, C @ Phi - A.conj().T @ Psi])

    return f


@dataclass
class Trajectory:
    ts: np.ndarray
    Phi: np.ndarray
    Psi: np.ndarray
    det_phi: np.ndarray
    problem: object = field(repr=False)
    solution: object = field(repr=False)
    stats: dict = field(default_factory=dict)

    @property
    def t0(self):
        return float(self.ts[0])

    @property
    def T(self):
        return float(self.ts[-1])

    def state(self, t):
        y = self.solution(t)
        return _split(y, self.problem.n)

    def det_at(self, t):
        return complex(np.linalg.det(self.state(t)[0]))

    def to_csv(self, fh):
        """Columns: t, Re/Im of every Phi entry (row major), Re/Im of det Phi."""
        n = self.problem.n
        writer = csv.writer(fh, lineterminator="\n")
        head = ["t"]
        for j in range(n):
            for k in range(n):
                head += [f"re_phi_{j}{k}", f"im_phi_{j}{k}"]
        writer.writerow(head + ["re_det", "im_det"])
        for t, P, d in zip(self.ts, self.Phi, self.det_phi):
            row = [repr(float(t))]
            for z in P.ravel():
                row += [repr(float(z.real)), repr(float(z.imag))]
            writer.writerow(row + [repr(float(d.real)), repr(float(d.imag))])


def integrate_hamiltonian(p, init=None, t_end=None, rtol=DEFAULT.ode_rtol, atol=DEFAULT.ode_atol,
                          max_step=0.1, conjoined_rel=DEFAULT.conjoined_rel):
    """Integrate ``Phi' = A Phi + B Psi``, ``Psi' = C Phi - A* Psi`` from conjoined data.

    A step that pushes ``|Phi* Psi - Psi* Phi|`` above
    ``conjoined_rel (|Phi|^2 + |Psi|^2) + 1e-10`` is rejected and retried with
    half the step.  The residual is accumulated drift, so after eight
    consecutive vetoes the step is taken anyway and the overrun is flagged in
    ``stats``.  Integration ends early if the solution leaves floating range.
    """
    n = p.n
    init = init or ConjoinedInitialData(n)
    t_end = p.t0 + (p.horizon or DEFAULT.horizon) if t_end is None else t_end
    worst = {"residual": 0.0, "overflow": False, "vetoes": 0, "overrun": False}

    def accept(t, y):
        Phi, Psi = y[:n], y[n:]
        size = float(np.linalg.norm(Phi) ** 2 + np.linalg.norm(Psi) ** 2)
        res = conjoined_residual(Phi, Psi)
        if res > conjoined_rel * size + 1e-10:
            worst["vetoes"] += 1
            if worst["vetoes"] < 8:
                return False
            worst["overrun"] = True
        worst["vetoes"] = 0
        worst["residual"] = max(worst["residual"], res / max(size, 1e-300))
        return True

    def stop(t, y):
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > 1e250:
            worst["overflow"] = True
            return True
        return False

    y0 = np.vstack([init.Phi0, init.Psi0]).astype(complex)
    sol = integrate(hamiltonian_rhs(p), p.t0, y0, t_end, rtol=rtol, atol=atol,
                    max_step=max_step, accept=accept, stop=stop)
    Phi = sol.ys[:, :n]
    Psi = sol.ys[:, n:]
    stats = {
        "accepted": sol.accepted, "rejected": sol.rejected, "hook_rejections": sol.hook_rejections,
        "max_conjoined_residual": worst["residual"], "overflow": worst["overflow"],
        "conjoined_overrun": worst["overrun"],
    }
    return Trajectory(sol.ts, Phi, Psi, np.linalg.det(Phi), p, sol, stats)


# ---------------------------------------------------------------- det Phi zeros

@dataclass
class DetZero:
    t: float
    width: float
    abs_det: float
    kind: str

    def to_json(self):
        return {"t": self.t, "width": self.width, "abs_det": self.abs_det, "kind": self.kind}


@dataclass
class DetZeroList:
    zeros: list
    unconfirmed: list
    t0: float
    T: float

    @property
    def times(self):
        return [z.t for z in self.zeros]

    @property
    def oscillation_observed(self):
        """At least two zeros, the last one in the final third of the horizon."""
        return len(self.zeros) >= 2 and self.zeros[-1].t >= self.t0 + 2.0 * (self.T - self.t0) / 3.0

    def to_json(self):
        return {
            "horizon": [self.t0, self.T],
            "zeros": [z.to_json() for z in self.zeros],
            "unconfirmed": [z.to_json() for z in self.unconfirmed],
            "oscillation_observed": self.oscillation_observed,
        }


def _local_det(traj, a, b):
    """``t -> det Phi(t)`` from a tight re-integration over ``[a, b]``."""
    y_a = traj.solution(a)
    local = integrate(hamiltonian_rhs(traj.problem), a, y_a, b, rtol=1e-12, atol=1e-14 * max(1.0, float(np.max(np.abs(y_a)))))
    n = traj.problem.n
    return lambda t: complex(np.linalg.det(local(t)[:n]))


def find_det_zeros(traj, subdivide=4, dip_detect=1e-2, dip_rel=DEFAULT.dip_rel,
                   bracket=DEFAULT.bracket, merge=DEFAULT.zero_merge, scale_window=200):
    """Zeros of ``det Phi`` on the trajectory.

    Sign changes of ``Re det`` (real problems) are refined by Brent's method.
    Local minima of ``|det|`` under ``dip_detect`` times the trailing median
    are refined by bounded minimisation; they count as zeros when the minimum
    falls under ``dip_rel`` times that scale, otherwise they are listed as
    unconfirmed.  Both refinements run on a tightly re-integrated segment.
    """
    steps = traj.solution.steps
    ts = [traj.t0]
    for st in steps:
        ts.extend(st.t + st.h * np.arange(1, subdivide + 1) / subdivide)
    ts = np.array(ts)
    d = np.array([traj.det_at(t) for t in ts])
    mag = np.abs(d)
    real = traj.problem.is_real
    found, unconfirmed = [], []

    def scale_at(k):
        return float(np.median(mag[max(0, k - scale_window):k + 1])) or 1.0

    if real:
        re = d.real
        for k in range(len(ts) - 1):
            if np.sign(re[k]) * np.sign(re[k + 1]) < 0:
                g = _local_det(traj, ts[k], ts[k + 1])
                kind = "sign"
                if np.sign(g(ts[k]).real) * np.sign(g(ts[k + 1]).real) >= 0:
                    # the tight segment lost the change; keep the trajectory's own
                    g, kind = traj.det_at, "sign-coarse"
                root = brentq(lambda t: complex(g(t)).real, ts[k], ts[k + 1], xtol=1e-12)
                found.append(DetZero(float(root), 2e-12, abs(g(root)), kind))
    for k in range(1, len(ts) - 1):
        if not (mag[k] <= mag[k - 1] and mag[k] <= mag[k + 1]):
            continue
        scale = scale_at(k)
        if mag[k] > dip_detect * scale:
            continue
        if real and (np.sign(d.real[k - 1]) * np.sign(d.real[k]) < 0 or np.sign(d.real[k]) * np.sign(d.real[k + 1]) < 0):
            continue
        a, b = ts[k - 1], ts[k + 1]
        g = _local_det(traj, a, b)
        res = minimize_scalar(lambda t: abs(g(t)), bounds=(a, b), method="bounded",
                              options={"xatol": bracket / 4})
        zero = DetZero(float(res.x), bracket / 2, float(res.fun), "dip")
        (found if res.fun <= dip_rel * scale else unconfirmed).append(zero)
    found.sort(key=lambda z: z.t)
    merged = []
    for z in found:
        if merged and z.t - merged[-1].t < merge:
            if z.abs_det < merged[-1].abs_det:
                merged[-1] = z
            continue
        merged.append(z)
    return DetZeroList(merged, unconfirmed, traj.t0, traj.T)


def simulate_oscillation(p, init=None, t_end=None):
    traj = integrate_hamiltonian(p, init, t_end)
    return traj, find_det_zeros(traj)


# ---------------------------------------------------------------- matrix Riccati

@dataclass
class MatrixRiccatiTrajectory:
    ts: np.ndarray
    Ys: np.ndarray
    solution: object = field(repr=False)
    max_antihermitian: float = 0.0

    def __call__(self, t):
        return hermitian_part(self.solution(t))


def integrate_matrix_riccati(p, Y0=None, t_end=None, rtol=DEFAULT.ode_rtol, atol=DEFAULT.ode_atol,
                             blowup=DEFAULT.blowup, max_step=0.1):
    """Integrate ``Y' + Y B Y + A* Y + Y A - C = 0`` until ``t_end`` or ``|Y| > blowup``.

    Each accepted state is replaced by its Hermitian part; the largest
    discarded anti-Hermitian part is kept as a diagnostic.
    """
    n = p.n
    Y0 = np.zeros((n, n), dtype=complex) if Y0 is None else as_matrix(Y0)
    if hermitian_residual(Y0) > 1e-12 * max(1.0, float(np.max(np.abs(Y0)))):
        raise NotHermitian("Y0 must be Hermitian")
    t_end = p.t0 + (p.horizon or DEFAULT.horizon) if t_end is None else t_end
    drift = {"max": 0.0}

    def f(t, Y):
        A, B, C = p.coefficients(t)
        return -(Y @ B @ Y + A.conj().T @ Y + Y @ A - C)

    def project(t, Y):
        drift["max"] = max(drift["max"], hermitian_residual(Y) / max(1.0, float(np.linalg.norm(Y))))
        return hermitian_part(Y)

    stop = lambda t, Y: float(np.linalg.norm(Y, 2)) > blowup
    last = {}
    try:
        sol = integrate(f, p.t0, Y0.astype(complex), t_end, rtol=rtol, atol=atol, max_step=max_step,
                        stop=lambda t, Y: last.update(t=t, Y=Y) or stop(t, Y), project=project)
    except StepUnderflow as err:
        if "Y" in last and np.linalg.norm(last["Y"], 2) > np.sqrt(blowup):
            return None, BlowUpReport("BlowUp", err.t, err.t, "norm", (last["t"], err.t))
        raise
    traj = MatrixRiccatiTrajectory(sol.ts, sol.ys, sol, drift["max"])
    if not sol.stopped:
        return traj, BlowUpReport("ExistsOnWholeInterval", float(t_end))
    t_s, Y_s = float(sol.ts[-1]), sol.ys[-1]
    rate = float(np.linalg.norm(f(t_s, Y_s), 2))
    gap = float(np.linalg.norm(Y_s, 2)) / rate if rate > 0 else 0.0
    t_star = t_s + gap
    return traj, BlowUpReport("BlowUp", t_star, t_star, "norm", (t_s, t_s + 2 * gap))


@dataclass
class CorrespondenceReport:
    first_zero: float
    blowup_time: float
    residual: float
    time_gap: float
    passed: bool

    def to_json(self):
        return dict(self.__dict__)


def check_correspondence_2_19(p, init=None, t_end=None, y_cap=100.0, rtol=1e-10, atol=1e-12,
                              residual_tol=1e-5, time_tol=1e-3):
    """Compare ``Psi Phi^{-1}`` from the linear system with an independent Riccati solve.

    The residual ``|Psi Phi^{-1} - Y|`` is taken where ``|Y| <= y_cap``, i.e.
    before the first zero of ``det Phi``; the Riccati blow-up time must match
    that zero.
    """
    n = p.n
    init = init or ConjoinedInitialData(n)
    if abs(np.linalg.det(init.Phi0)) == 0:
        raise SchemaError("Phi0 must be invertible")
    t_end = p.t0 + (p.horizon or DEFAULT.horizon) if t_end is None else t_end
    traj = integrate_hamiltonian(p, init, t_end, rtol=rtol, atol=atol)
    zeros = find_det_zeros(traj)
    first = zeros.zeros[0].t if zeros.zeros else None
    Y0 = init.Psi0 @ np.linalg.inv(init.Phi0)
    ric, rep = integrate_matrix_riccati(p, Y0, t_end, rtol=rtol, atol=atol)
    t_star = rep.t_star if rep.blew_up else None
    residual = 0.0
    if ric is not None:
        for t, Y in zip(ric.ts, ric.Ys):
            if np.linalg.norm(Y, 2) > y_cap:
                break
            Phi, Psi = traj.state(t)
            residual = max(residual, float(np.linalg.norm(Psi @ np.linalg.inv(Phi) - Y, 2)))
    if first is None and t_star is None:
        gap, ok_time = 0.0, True
    elif first is None or t_star is None:
        gap, ok_time = float("inf"), False
    else:
        gap = abs(first - t_star)
        ok_time = gap <= time_tol
    return CorrespondenceReport(first, t_star, residual, gap, ok_time and residual <= residual_tol)
