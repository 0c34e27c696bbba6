"""
Dimension omega with finite supports
====================================

Relations over infinitely many coordinates that only look at finitely
many of them.  A cylinder over G can be traded for a substitution onto
fresh coordinates followed by a cylinder there.
"""

from palg.lofin import (CofiniteTransformation, fresh_witness_identity, kernel_rectangle, lf_axiom_sweep,
                        lf_cyl, lf_subst, parse_literal, split_below, to_literal)

x = parse_literal("s(0)=0 & s(1)=1", 2)
print("x            =", to_literal(x), " support", x.support)
print("c{0} x       =", to_literal(lf_cyl([0], x)))

tau = CofiniteTransformation.of({0: 9})
print("s_tau x      =", to_literal(lf_subst(tau, x)))
print("fresh witness:", fresh_witness_identity(x, [0], {0: 9}).passed)

# substituting a rectangle intersects constraints along kernel classes
print(kernel_rectangle(CofiniteTransformation.of({1: 0, 2: 4}), {0: [0, 1], 1: [1, 2], 2: [2]}))

# no atoms: everything nonzero splits
y = split_below(x)
print("strictly below x:", to_literal(y))

for rep in lf_axiom_sweep(3, 100, seed=0):
    print(f"  {rep.law:>4} {'ok' if rep.passed else 'FAIL'}  {rep.title}")
