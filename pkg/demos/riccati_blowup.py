# Zeros of det Phi and poles of the Riccati solution Y = Psi Phi^{-1} coincide.
import numpy as np

from hamosc import catalog
from hamosc.dynamics import check_correspondence_2_19
from hamosc.problem import HamiltonianProblem, MatrixFunction
from hamosc.scalar_riccati import ScalarRiccatiProblem, TwoByTwoSystem, solve_scalar_riccati, theorem_2_2_oscillation_check

# y' + y^2 + 1 = 0, y(0) = 0 is -tan t
_, rep = solve_scalar_riccati(ScalarRiccatiProblem(1.0, 0.0, 1.0), 3.0)
print("scalar blow-up at %.8f, pi/2 = %.8f" % (rep.t_star, np.pi / 2))

v = theorem_2_2_oscillation_check(TwoByTwoSystem(0.0, 1.0, -1.0, 0.0), horizon=20.0)
print("harmonic 2x2 system:", v.summary())
print("  zeros of phi:", np.round(v.auxiliary["simulation_zeros"], 6))

# Euler's equation oscillates, yet -int a21 converges, so the test stays silent
euler = TwoByTwoSystem(0.0, 1.0, "-1/(2*t^2)", 0.0, t0=1.0)
print("Euler system:", theorem_2_2_oscillation_check(euler, horizon=1000.0).summary())

rng = np.random.default_rng(3)
print("\nrandom constant problems, B > 0, C < 0:")
for k in range(5):
    n = int(rng.integers(1, 4))
    G, H = rng.standard_normal((n, n)), rng.standard_normal((n, n))
    p = HamiltonianProblem(MatrixFunction.constant(0.3 * rng.standard_normal((n, n))),
                           MatrixFunction.constant(G @ G.T + 0.5 * np.eye(n), ("hermitian",)),
                           MatrixFunction.constant(-(H @ H.T + 0.5 * np.eye(n)), ("hermitian",)))
    r = check_correspondence_2_19(p, t_end=8.0)
    print(f"  n={n}  first zero {r.first_zero:.8f}  blow-up {r.blowup_time:.8f}  |Psi Phi^-1 - Y| <= {r.residual:.1e}")

r = check_correspondence_2_19(catalog.get("example_3_1"), t_end=4.0)
print("rotation example: zero %.8f, blow-up %.8f" % (r.first_zero, r.blowup_time))
