"""
Representing through an ultrafilter
===================================

Pick a point y0 of the dilation and an atom below it, then map each
element a to the maps tau with the atom below s_(y0 o tau) a.  On the full
2x2 algebra this yields a complete representation.  On the line with two
points and a deliberately poor witness the cylindrification clause breaks,
which is an artifact of working at finite dimension.
"""

from palg import FullSetAlgebra
from palg.represent import henkin_construct, oracle_complete_representability, verify_representation

A = FullSetAlgebra.of(2, 2)
f = henkin_construct(A, 3, A.unit)
rep = verify_representation(A, f)
print("y0 =", f.meta["y0"], " complete:", rep.is_complete_representation)
for a in (1, 2, 4, 8):
    print(f"  f({a:#x}) = {sorted(f.image_points(a))}")

B = FullSetAlgebra.of(1, 2)
g = henkin_construct(B, 2, 0x2)
rep = verify_representation(B, g)
print("failed clauses:", rep.failed_clauses())
print("diagnosis:", rep.diagnosis)

res = oracle_complete_representability(B, 3)
print("oracle finds a complete representation of the line anyway:", res.found)
