"""
Set semantics on a small square
===============================

The full algebra of subsets of 2x2 (points (s0, s1) with s_i in {0, 1}),
its cylindrifications and substitutions, a term evaluated against it,
and the ten postulates checked exhaustively.
"""

from palg import FullSetAlgebra
from palg.laws import axiom_suite
from palg.termlang import check_equation, evaluate, parse, parse_equation

A = FullSetAlgebra.of(2, 2)
sp = A.space
x = sp.mask_of_points([(0, 1)])
print("x           =", sorted(sp.points_of_mask(x)))

# c_{0} frees coordinate 0: every point agreeing with (0, 1) off 0.
print("c{0} x      =", sorted(sp.points_of_mask(A.cyl([0], x))))

# s_[1,0] swaps the coordinates; s_[0,0] asks for s0 == s1, which (0,1) fails.
print("s[1,0] x    =", sorted(sp.points_of_mask(A.subst([1, 0], x))))
print("s[0,0] x    =", sorted(sp.points_of_mask(A.subst([0, 0], x))))

t = parse("c{0}(x . -y) + s[0:1](x)")
print("term value  =", hex(evaluate(A, t, {"x": x, "y": 0})))

v = check_equation(A, parse_equation("c{0}(x) = x"))
print("c{0}(x) = x holds?", v.passed, "witness", v.witness, "values", v.values)

for rep in axiom_suite(A):
    print(f"{rep.law:>4}  {'ok ' if rep.passed else 'FAIL'}  {rep.checked:6d} checks  {rep.title}")
