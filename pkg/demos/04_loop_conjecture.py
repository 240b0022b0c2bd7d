"""
Small digraphs
==============

Loopless smooth digraphs of algebraic length one should not admit a
near-unanimity polymorphism.  Search all small ones and a random sample.
"""

from taylorlab.digraphs import check_loop_conjecture

small = check_loop_conjecture(3, 3)
print("up to 3 vertices:", small.summary())

sample = check_loop_conjecture(4, 3, "sample", sample=1000, seed=2024)
print("1000 on 4 vertices:", sample.summary())
