"""Quadrature over ``[t0, t]`` and finite-horizon divergence classification.

A limit ``lim f(t) = +inf`` cannot be decided from finitely many samples.
:func:`classify_divergence` only certifies a *trend*: the last checkpoint
clears a threshold, the trailing window is strictly increasing, and the
growth over the second half of the horizon is at least roughly that of the
first half.
"""
from dataclasses import dataclass, field
import enum
import math

import numpy as np

from .config import DEFAULT
from .errors import HamoscError


@dataclass(frozen=True)
class Quadrature:
    """Composite Simpson rule refined by halving the step.

    Refinement stops when ``|I_h - I_{h/2}| <= atol + rtol * |I_{h/2}|`` or
    after ``max_depth`` halvings.
    """

    h: float = None
    panels: int = 4
    atol: float = DEFAULT.quad_atol
    rtol: float = DEFAULT.quad_rtol
    max_depth: int = DEFAULT.quad_depth


@dataclass(frozen=True)
class QuadResult:
    value: object
    error: float
    converged: bool
    evaluations: int
    nonsmooth: bool = False

    def __iter__(self):
        yield self.value
        yield self.error


def _simpson(values, h):
    return (h / 3.0) * (values[0] + values[-1] + 4.0 * values[1:-1:2].sum(axis=0) + 2.0 * values[2:-1:2].sum(axis=0))


def integrate_scalar(f, t0, t1, quad=Quadrature(), nonsmooth=False):
    """Integrate ``f`` over ``[t0, t1]``.

    ``f`` may return scalars or arrays; for arrays the refinement test uses the
    largest entrywise difference.  Returns a :class:`QuadResult`, which also
    unpacks as ``(value, error)``.
    """
    if t1 < t0:
        raise ValueError("integration bounds must satisfy t1 >= t0")
    if t1 == t0:
        zero = np.zeros_like(np.asarray(f(t0)))
        return QuadResult(zero[()] if zero.ndim == 0 else zero, 0.0, True, 1)
    span = t1 - t0
    m = quad.panels if quad.h is None else max(2, math.ceil(span / quad.h))
    m += m % 2
    ts = np.linspace(t0, t1, m + 1)
    values = np.array([f(t) for t in ts])
    previous = _simpson(values, span / m)
    evaluations = m + 1
    for _ in range(quad.max_depth):
        mids = 0.5 * (ts[:-1] + ts[1:])
        new = np.array([f(t) for t in mids])
        evaluations += len(mids)
        merged_t = np.empty(2 * m + 1)
        merged_t[0::2] = ts
        merged_t[1::2] = mids
        merged_v = np.empty((2 * m + 1,) + values.shape[1:], dtype=np.result_type(values, new))
        merged_v[0::2] = values
        merged_v[1::2] = new
        ts, values, m = merged_t, merged_v, 2 * m
        current = _simpson(values, span / m)
        diff = float(np.max(np.abs(current - previous)))
        scale = float(np.max(np.abs(current)))
        if diff <= quad.atol + quad.rtol * scale:
            value = current + (current - previous) / 15.0
            return QuadResult(value, diff, True, evaluations, nonsmooth)
        previous = current
    return QuadResult(current, diff, False, evaluations, nonsmooth)


def integrate_matrix(Mf, t0, t1, quad=Quadrature()):
    """Entrywise integral of a matrix-valued function."""
    return integrate_scalar(lambda t: np.asarray(Mf(t), dtype=complex), t0, t1, quad)


def cumulative_integral(f, ts, quad=Quadrature(), nonsmooth=False):
    """Integrals of ``f`` from ``ts[0]`` to every ``ts[k]``.

    Returns ``(values, max_error, all_converged)`` with ``values[0] == 0``.
    """
    total = None
    out = []
    err = 0.0
    ok = True
    for a, b in zip(ts[:-1], ts[1:]):
        res = integrate_scalar(f, a, b, quad, nonsmooth)
        total = res.value if total is None else total + res.value
        out.append(total)
        err += res.error
        ok = ok and res.converged
    zero = np.zeros_like(out[0]) if out else 0.0
    return np.array([zero] + out), err, ok


class Trend(enum.Enum):
    DIVERGES = "DivergesToPlusInfinity"
    BOUNDED = "Bounded"
    UNDETERMINED = "Undetermined"


@dataclass
class DivergenceTrace:
    name: str
    checkpoints: np.ndarray
    values: np.ndarray
    classification: Trend
    theta: float
    window: int
    mid_value: float = float("nan")
    reasons: list = field(default_factory=list)
    failed_at: float = None

    @property
    def diverges(self):
        return self.classification is Trend.DIVERGES

    @property
    def T(self):
        return float(self.checkpoints[-1])

    @property
    def value_at_T(self):
        return float(self.values[-1])

    def to_json(self):
        return {
            "name": self.name,
            "T": self.T,
            "value_at_T": self.value_at_T,
            "classification": self.classification.value,
            "theta": self.theta,
            "window": self.window,
            "reasons": list(self.reasons),
        }


def default_checkpoints(t0, T, count=DEFAULT.checkpoints):
    """``count`` equal intervals over ``[t0, T]``; the midpoint is a checkpoint when ``count`` is even."""
    return np.linspace(t0, T, count + 1)


def classify_trace(ts, values, theta=None, window=DEFAULT.window,
                   growth_ratio=DEFAULT.growth_ratio, name="", mid_value=None):
    """Classify already computed checkpoint values of a limit quantity."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if not 2 <= window <= len(ts):
        raise ValueError("window must satisfy 2 <= window <= number of checkpoints")
    if mid_value is None:
        mid_value = float(np.interp(0.5 * (ts[0] + ts[-1]), ts, values))
    v0 = float(values[0])
    if theta is None:
        theta = DEFAULT.theta_factor * (1.0 + abs(v0))
    trace = DivergenceTrace(name, ts, values, Trend.BOUNDED, float(theta), window, float(mid_value))
    if not np.all(np.isfinite(values)) or not math.isfinite(mid_value):
        trace.classification = Trend.UNDETERMINED
        trace.reasons.append("non-finite value on the trace")
        return trace
    vT = float(values[-1])
    ok = True
    if vT < theta:
        ok = False
        trace.reasons.append(f"value(T)={vT:.6g} below threshold {theta:.6g}")
    tail = values[-window:]
    if not np.all(np.diff(tail) > 0):
        ok = False
        trace.reasons.append(f"not strictly increasing over the last {window} checkpoints")
    first_half = mid_value - v0
    if first_half > 0 and (vT - v0) < growth_ratio * first_half:
        ok = False
        trace.reasons.append(
            f"growth over second half too slow: value(T)-value(t0)={vT - v0:.6g} < "
            f"{growth_ratio}*(value(mid)-value(t0))={growth_ratio * first_half:.6g}"
        )
    if ok:
        trace.classification = Trend.DIVERGES
    return trace


def classify_divergence(f, t0, T, theta=None, window=DEFAULT.window,
                        checkpoints=DEFAULT.checkpoints, growth_ratio=DEFAULT.growth_ratio, name=""):
    """Evaluate ``f`` on the checkpoint grid over ``[t0, T]`` and classify the trend."""
    if not T > t0:
        raise ValueError("T must exceed t0")
    ts = default_checkpoints(t0, T, checkpoints)
    values = []
    for t in ts:
        try:
            v = float(f(t))
        except (HamoscError, ArithmeticError, ValueError) as err:
            trace = DivergenceTrace(name, ts, np.array(values + [np.nan]), Trend.UNDETERMINED,
                                    float("nan") if theta is None else theta, window)
            trace.failed_at = float(t)
            trace.reasons.append(f"evaluation failed at t={t:g}: {err}")
            return trace
        values.append(v)
    try:
        mid = float(f(0.5 * (t0 + T)))
    except (HamoscError, ArithmeticError, ValueError):
        mid = None
    return classify_trace(ts, values, theta, window, growth_ratio, name, mid)
