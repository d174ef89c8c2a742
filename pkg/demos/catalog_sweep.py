# Every catalog problem through every checker, with simulation alongside.
# Slow: about a minute.
import time

from hamosc import catalog
from hamosc.criteria import CriterionConfig, run_all

cfg = CriterionConfig()
for name in catalog.names():
    start = time.perf_counter()
    table = run_all(catalog.get(name), cfg)
    certified = [v.criterion_id for v in table.verdicts if v.oscillatory]
    zeros = len(table.zeros.zeros) if table.zeros else None
    print(f"{name:<22} zeros {zeros!s:>4}   certified by {', '.join(certified) or '-':<62} "
          f"{time.perf_counter() - start:5.1f}s")
    for flag in table.flags:
        print("   FLAG", flag)
