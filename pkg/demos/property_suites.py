# The matrix inequalities behind the criteria, checked on seeded random samples.
from hamosc.properties import run_all_suites

for r in run_all_suites(seed=0, cases=300):
    print(f"{'ok  ' if r.passed else 'FAIL'} {r.name:<28} worst margin {r.worst_margin:9.2e}   {r.statement}")
