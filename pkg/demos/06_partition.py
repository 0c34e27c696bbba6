"""
A partition algebra
===================

Four points, the diagonal plus two off-diagonal blocks.  A principal
ultrafilter picks a point, the generated subalgebra is computed, and the
brute-force oracle looks for a complete representation.
"""

from palg import partition_algebra
from palg.algebra import subalgebra_bao
from palg.represent import oracle_complete_representability

u = 4
diag = [(x, x) for x in range(u)]
q1 = [(x, y) for x in range(u) for y in range(u) if x != y and x ^ y == 1]
q2 = [(x, y) for x in range(u) for y in range(u) if x != y and x ^ y != 1]

P = partition_algebra(u, [diag, q1, q2], 2)
print("subalgebra:", [hex(e) for e in P.subalgebra])
B = subalgebra_bao(P.algebra, P.subalgebra)
res = oracle_complete_representability(B, 3)
print("completely representable (base <= 3):", res.found)
