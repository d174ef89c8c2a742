# Constant skew drift A0 with B = I and C = -A0^T A0.
# The Leighton-type test cannot see the oscillation, the inverse-trace test can.
import numpy as np

from hamosc import catalog
from hamosc.criteria import CriterionConfig, check_T1_1, check_T3_4
from hamosc.dynamics import find_det_zeros, integrate_hamiltonian

p = catalog.get("example_3_1")
print(catalog.describe("example_3_1"))

cfg = CriterionConfig(horizon=100.0)
leighton = check_T1_1(p, cfg)
print("\nT1.1:", leighton.summary())
# second trace is g(-A0) at every checkpoint, so it never grows
print("  second trace, first and last values:", leighton.traces[1].values[[0, -1]])

inverse_trace = check_T3_4(p, cfg)
print("T3.4:", inverse_trace.summary())
tr = inverse_trace.traces[1]
print("  slope of the second trace: %.6f (expected 8)" % (tr.value_at_T / tr.T))

# Phi(t) = exp(A0 t) cos t, so det Phi = cos^2 t: every zero is a double zero
traj = integrate_hamiltonian(p, t_end=20.0)
zeros = find_det_zeros(traj)
expected = np.pi / 2 + np.pi * np.arange(len(zeros.times))
for z, e in zip(zeros.zeros, expected):
    print(f"  zero {z.t:.10f}  error {abs(z.t - e):.1e}  found by {z.kind}")
