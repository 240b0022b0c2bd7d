"""
Finding a loop
==============

A symmetric relation with a triangle, closed under the median of three
elements, must contain a loop.  We watch the construction find one.
"""

from taylorlab.algebra import Relation
from taylorlab.closure import extract_witness, generate_closure
from taylorlab.library import median
from taylorlab.loops import brute_loop, find_loop

A = median()
triangle = [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]

print("1. close the triangle under m...")
c = generate_closure(A, triangle)
R = Relation.of(3, [tuple(r) for r in c.elements])
print("   R:", sorted(R.tuples))
i = c.index_of((1, 1))
print("   (1,1) is", extract_witness(c, i), "applied to the generators")

print("2. run the constructive search...")
cert = find_loop(R, A.ops["m"], "nu")
for f in cert.trace:
    print(f"   {f.phase:12s} g_arity={f.g_arity} cycle={f.cycle_length}")
print("   loop:", cert.loop)
print("   brute force agrees:", brute_loop(R) is not None)
