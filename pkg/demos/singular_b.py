# A singular B: n = 2, m = 1, B = diag(1, 0).
# B X = A has no solution, so the F-based criteria are out; the sqrt(B) route works.
import numpy as np

from hamosc import catalog
from hamosc.criteria import CriterionConfig, check_T3_1, check_T3_5
from hamosc.matrix_equations import solve_bx_eq_a

p = catalog.get("example_3_2")
A, B, C = p.coefficients(0.0)
rep = solve_bx_eq_a(B, A)
print("B X = A:", rep.status.value, "ranks", rep.ranks)

cfg = CriterionConfig(horizon=40.0)
print("T3.1:", check_T3_1(p, cfg).summary())

v = check_T3_5(p, cfg)
print("T3.5:", v.summary())
tr = v.trace("J_2")
print("  J_2 at a few checkpoints vs m (t - t0):")
for t, val in list(zip(tr.checkpoints, tr.values))[::16]:
    print(f"    t = {t:6.2f}   J_2 = {val:10.6f}   m (t - t0) = {t - p.t0:10.6f}")

# with C = +I the same J_2 runs to minus infinity
lit = check_T3_5(catalog.get("example_3_2_literal"), cfg)
print("literal sign, T3.5:", lit.summary(), " J_2(T) =", lit.traces[0].value_at_T)
