"""
Terms from tables
=================

Start from a two-element algebra given by one operation table and
synthesize explicit terms for stronger and stronger conditions.
"""

from taylorlab.algebra import is_taylor_operation, satisfies
from taylorlab.conditions import builtin_system
from taylorlab.forge import double_loop_from_taylor, run_pipeline, siggers_from_nu
from taylorlab.library import majority, xor3

print("== 1. which coordinates can be separated? ==")
for A in (xor3(), majority()):
    (name, op), = A.ops.items()
    rep = is_taylor_operation(op)
    print(f"   {name}: Taylor={bool(rep)}")
    for eq in rep.system.equations().equations:
        print("      ", eq)

print("== 2. a 6-ary Siggers term over majority ==")
res = siggers_from_nu(majority(), "maj")
print("   ", res.term)
print("    verified:", res.verified)

print("== 3. double loop terms (12-ary) ==")
for A in (xor3(), majority()):
    res = double_loop_from_taylor(A)
    ok = satisfies(A, builtin_system("double_loop"), {"d": res.term})
    print(f"   {res.term}   holds: {ok}")

print("== 4. the full chain on xor3 ==")
rep = run_pipeline(xor3())
for k, v in rep.summary().items():
    print(f"   {k}: {v}")
print("   weak 3-cube term has", len(str(rep.weak_3cube.term)), "characters")
