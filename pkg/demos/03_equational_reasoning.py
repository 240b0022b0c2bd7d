"""
Proofs and countermodels
========================

Check the symbolic steps of the term constructions with congruence
closure, then separate two conditions with a finite algebra.
"""

from taylorlab.conditions import builtin_system
from taylorlab.prover import find_countermodel, verify_derivation_suite

print("== derivation suite ==")
rep = verify_derivation_suite()
for e in rep.entries:
    print(f"   {e.name:24s} {e.result.status} at depth {e.result.depth}")
print("   drop idempotency and these break:", sorted(rep.ablation_broken))

print("== countermodels ==")
for goal in ("nu(3)", "wnu(3)"):
    res = find_countermodel(builtin_system("maltsev"), builtin_system(goal))
    if res:
        print(f"   maltsev does not give {goal}:", res.algebra.ops["m"].table.tolist())
    else:
        print(f"   no two-element countermodel for maltsev => {goal}")
