"""Numerical tolerances shared across the package.

Every threshold the library uses lives on :class:`Tolerances`; callers that
need different values build their own instance with :func:`dataclasses.replace`.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # matrix_core
    hermitian: float = 1e-10
    singular_rel: float = 1e-12
    jacobi_sweeps: int = 100
    # matrix_equations
    rank_rel: float = 1e-10
    residual_rel: float = 1e-8
    omega_spread: float = 1e-8
    # problem_dsl
    fd_step: float = 1e-5
    sample_points: int = 16
    sample_span: float = 10.0
    # calculus
    quad_atol: float = 1e-10
    quad_rtol: float = 1e-10
    quad_depth: int = 12
    checkpoints: int = 64
    window: int = 8
    theta_factor: float = 10.0
    growth_ratio: float = 1.9
    horizon: float = 200.0
    # ODE integration
    ode_rtol: float = 1e-8
    ode_atol: float = 1e-10
    blowup: float = 1e8
    bracket: float = 1e-6
    conjoined_rel: float = 1e-6
    zero_merge: float = 1e-5
    dip_rel: float = 1e-6


DEFAULT = Tolerances()
