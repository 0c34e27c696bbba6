"""
Functional dilation
===================

Lift the 2-dimensional full algebra on two points into a 3-dimensional
algebra of functions from 2^3 to A.  Base elements embed as y -> s_(y|2) p.
"""

from palg import FullSetAlgebra
from palg.dilation import CARDINAL_NOTE, Dilation

A = FullSetAlgebra.of(2, 2)
D = Dilation(A, 3)
print(D)
print(CARDINAL_NOTE)

p = A.space.mask_of_points([(0, 1)])
E = D.embed(p)
print("E(p) values:", [hex(int(v)) for v in E.values])

# substitution by a 3-map and its certificate
f = D.dsubst([1, 0, 2], E)
print("s_[1,0,2] E(p):", [hex(int(v)) for v in f.values], "certificate", f.cert[0].to_list(), hex(f.cert[1]))

# the cylindrification does not depend on which valid rho is used
q = D.dsubst([2, 1, 0], E)
sigma, _ = q.cert
rhos = D.valid_rhos(sigma)
print(len(rhos), "valid rho; all agree:", D.rho_independent([0], q))
print("sweep:", D.rho_independence_sweep(5000))

# the cylinder versus the join of substituted copies: a defect remains at finite beta
for beta in (3, 4, 5):
    Db = Dilation(A, beta)
    reports = [Db.check_eq1(gm, x) for x in range(16) for gm in ([0], [1], [0, 1])]
    total = sum(r.defect_size for r in reports)
    # fraction of the (y, atom) cells of the cylinder that the join misses
    print(f"beta={beta}: defect per instance {total / (len(reports) * Db.size * A.nbits):.3f}")
