"""
An algebra whose substitution is not additive
=============================================

Two atoms, one dimension.  The substitution sends the unit to the first
atom, so it is normal but not a join homomorphism.  The psi schema still
holds, and the canonical embedding into the complex algebra of its atom
structure breaks.
"""

from palg import non_additive_example
from palg.atomstruct import atom_structure, canonical_embedding_check, complex_algebra
from palg.laws import additivity_sweep, schema_sweep

g = non_additive_example()
print("s_[0] table:", g.subst_table([0]).tolist())
print("c_{0} table:", g.cyl_table([0]).tolist())

for v in additivity_sweep(g):
    state = "additive" if v.passed else f"fails at {v.witness}  {v.values}"
    print(f"  {v.label:10s} {state}")

for v in schema_sweep(g, include_bijections=True):
    print(f"  schema {v.label:10s} {'ok' if v.passed else 'FAIL'}")

S = atom_structure(g)
Cm = complex_algebra(S)
print("complex algebra s_[0]:", Cm.subst_table([0]).tolist())
v = canonical_embedding_check(g)
print("canonical embedding is a homomorphism?", v.passed, v.values)
