"""Run the reproduction suite from Python; equivalent to ``eikonal validate``."""
from eikonal.validation import CASES, run_case

for name in ("semicircle", "duality", "bridge-endpoints"):
    res = run_case(name)
    print(f"{name}: {'PASS' if res.passed else 'FAIL'}")
    for c in res.checks:
        print(f"   {c.label}: {c.value:.3e} {c.relation} {c.limit:.1e}")
print("all cases:", sorted(CASES))
