# The A_Q construction: with free entries on one part of the matrix and the rest
# filled by minus the row or column sums, Sep(alpha A + beta A*) vanishes.
import numpy as np

from hamosc import catalog
from hamosc.criteria import CriterionConfig, check_T3_7_and_C2_2
from hamosc.matrix_core import separator
from hamosc.matrix_equations import a_alpha_beta_gamma

rng = np.random.default_rng(0)
a = rng.standard_normal((4, 4)).tolist()
for branch in catalog.BRANCHES:
    A = catalog.build_a_q(branch, a)
    alpha = catalog.ALPHA[branch]
    S = separator(a_alpha_beta_gamma(A, alpha, 1 - alpha, 0.0))
    print(f"{branch}: alpha = {alpha:.1f}   max |Sep| = {np.abs(S).max():.1e}")
    print("   row sums", np.round(A.sum(axis=1), 12), " column sums", np.round(A.sum(axis=0), 12))

print()
print(catalog.describe("example_3_3"))
cfg = CriterionConfig(horizon=60.0)
for name in catalog.FAMILIES["example_3_3"]:
    v = check_T3_7_and_C2_2(catalog.get(name), cfg)
    print(f"{name}: {v.criterion_id} {v.summary()}")
    for note in v.notes:
        if "rejected" in note:
            print("    ", note)
