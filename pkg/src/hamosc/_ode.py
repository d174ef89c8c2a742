"""Dormand-Prince 5(4) integrator with dense output and step hooks.

Works on real or complex ``numpy`` state arrays of any shape.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import StepUnderflow

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# continuous extension: y(t + x h) = y + h * sum_k K_k * (P_k . [x, x^2, x^3, x^4])
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


@dataclass
class Step:
    t: float
    h: float
    y: np.ndarray
    K: np.ndarray

    def __call__(self, t):
        x = (t - self.t) / self.h
        powers = np.array([x, x * x, x**3, x**4])
        coeff = _P @ powers
        return self.y + self.h * np.tensordot(coeff, self.K, axes=1)


@dataclass
class OdeSolution:
    ts: np.ndarray
    ys: np.ndarray
    steps: list = field(repr=False)
    accepted: int = 0
    rejected: int = 0
    hook_rejections: int = 0
    stopped: bool = False

    def __call__(self, t):
        """Dense-output value at ``t`` inside the integrated range."""
        if t <= self.ts[0]:
            return self.ys[0].copy()
        if t >= self.ts[-1]:
            return self.ys[-1].copy()
        k = int(np.searchsorted(self.ts, t, side="right")) - 1
        return self.steps[k](t)


def _initial_step(f, t0, y0, f0, direction_span, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, direction_span)
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, direction_span)


def integrate(f, t0, y0, t_end, rtol=1e-8, atol=1e-10, max_step=np.inf,
              accept=None, stop=None, h0=None, project=None):
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end``.

    ``accept(t, y)`` may veto an otherwise acceptable step, which is then
    retried with half the step size.  ``stop(t, y)`` ends the integration
    after an accepted step.  Raises :class:`StepUnderflow` when the step size
    collapses below round-off level.  ``project(t, y)`` maps every accepted
    state back onto a constraint set (the dense output of that step keeps the
    unprojected end point).
    """
    y = np.array(y0, dtype=np.result_type(np.asarray(y0), float))
    t = float(t0)
    span = float(t_end) - t
    if span <= 0:
        raise ValueError("t_end must exceed t0")
    fy = np.asarray(f(t, y))
    if np.iscomplexobj(fy) and not np.iscomplexobj(y):
        y = y.astype(complex)
    h = h0 if h0 is not None else _initial_step(f, t, y, fy, span, rtol, atol)
    h = min(h, max_step)
    ts = [t]
    ys = [y.copy()]
    steps = []
    accepted = rejected = hook_rejections = 0
    K = np.empty((7,) + y.shape, dtype=np.result_type(y, fy))
    stopped = False
    while t < t_end:
        hmin = 16 * np.spacing(max(abs(t), 1.0))
        if h < hmin:
            raise StepUnderflow(t, h)
        last = t + h >= t_end
        if last:
            h = t_end - t
        K[0] = fy
        for s in range(1, 6):
            dy = np.tensordot(np.array(_A[s]), K[:s], axes=1)
            K[s] = f(t + _C[s] * h, y + h * dy)
        y_new = y + h * np.tensordot(_B, K[:6], axes=1)
        f_new = np.asarray(f(t + h, y_new))
        K[6] = f_new
        err = h * np.tensordot(_E, K, axes=1)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))
        if not np.isfinite(err_norm):
            rejected += 1
            h *= 0.2
            continue
        if err_norm > 1.0:
            rejected += 1
            h *= max(0.2, 0.9 * err_norm ** -0.2)
            continue
        t_new = t_end if last else t + h
        if accept is not None and not accept(t_new, y_new):
            hook_rejections += 1
            h *= 0.5
            continue
        steps.append(Step(t, h, y.copy(), K.copy()))
        if project is not None:
            y_new = project(t_new, y_new)
            f_new = np.asarray(f(t_new, y_new))
        t, y, fy = t_new, y_new, f_new
        ts.append(t)
        ys.append(y.copy())
        accepted += 1
        factor = 5.0 if err_norm == 0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
        h = min(h * factor, max_step)
        if stop is not None and stop(t, y):
            stopped = True
            break
    return OdeSolution(np.array(ts), np.array(ys), steps, accepted, rejected, hook_rejections, stopped)
