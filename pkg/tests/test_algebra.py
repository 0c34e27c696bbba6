import numpy as np
import pytest
from hypothesis import given, strategies as st

from palg.algebra import (FiniteBAO, FullSetAlgebra, Operator, generated_subalgebra, minimal_support,
                          degree_report, neat_reduct, parse_operator,
                          partition_algebra, subalgebra_bao, to_bao)
from palg.errors import CapacityError, DimensionError, MalformedInput, UnsupportedOperation
from palg.represent import oracle_complete_representability

import oracles

SMALL = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 2)]


def test_cyl_examples(A22):
    sp = A22.space
    x = sp.mask_of_points([(0, 1)])
    assert A22.cyl([0], x) == sp.mask_of_points([(0, 1), (1, 1)])
    assert all(A22.cyl(g, 0) == 0 for g in A22.gammas())
    assert all(A22.cyl([], y) == y for y in range(16))


def test_subst_examples(A22):
    sp = A22.space
    x = sp.mask_of_points([(0, 1)])
    assert A22.subst([1, 0], x) == sp.mask_of_points([(1, 0)])
    assert A22.subst([0, 0], x) == 0
    assert all(A22.subst([0, 1], y) == y for y in range(16))


@pytest.mark.parametrize("dim,u", SMALL)
def test_tables_match_set_oracle(dim, u):
    A = FullSetAlgebra.of(dim, u)
    n = u ** dim
    rng = np.random.default_rng(dim * 10 + u)
    masks = range(1 << n) if n <= 8 else rng.integers(0, 1 << n, 40)
    for op in A.operators():
        T = A.table(op)
        for m in masks:
            m = int(m)
            want = (oracles.cyl_mask(op.arg.to_list(), m, dim, u) if op.kind == "c"
                    else oracles.subst_mask(op.arg.to_list(), m, dim, u))
            assert T[m] == want
            assert A._apply_direct(op, m) == want


def test_relativized_operations_stay_below_unit():
    A = FullSetAlgebra.of(2, 3, unit=0b101010101)
    unit = oracles.to_set(A.unit, 2, 3)
    for op in A.operators():
        for m in range(0, 1 << 9, 7):
            m &= A.unit
            X = oracles.to_set(m, 2, 3)
            want = (oracles.cyl(op.arg.to_list(), X, 2, 3, unit) if op.kind == "c"
                    else oracles.subst(op.arg.to_list(), X, 2, 3, unit))
            assert A.apply(op, m) == oracles.to_mask(want, 2, 3)


def test_dimension_mismatch(A22):
    with pytest.raises(DimensionError):
        A22.subst([0], 1)
    with pytest.raises(DimensionError):
        A22.cyl([2], 1)


def test_parse_operator():
    assert parse_operator("c{0,1}", 2) == Operator.cyl([0, 1], 2)
    assert parse_operator("s[1,0]", 2).key() == "s[1,0]"
    assert parse_operator("identity", 2).key() == "s[0,1]"
    with pytest.raises(MalformedInput):
        parse_operator("q", 2)


@given(st.integers(0, 15), st.integers(0, 15))
def test_postulate6_and_4_on_full_units(x, y):
    A = FullSetAlgebra.of(2, 2)
    for t in A.taus():
        assert A.subst(t, x | y) == A.subst(t, x) | A.subst(t, y)
        assert A.subst(t, x & y) == A.subst(t, x) & A.subst(t, y)
        assert A.subst(t, A.complement(x)) == A.complement(A.subst(t, x))
        assert A.subst(t, 0) == 0 and A.subst(t, A.unit) == A.unit
    for g in A.gammas():
        assert A.cyl(g, x & A.cyl(g, y)) == A.cyl(g, x) & A.cyl(g, y)


def test_generated_subalgebra_examples(A12, A22):
    assert generated_subalgebra(A22, []) == [0, 15]
    assert generated_subalgebra(A22, [15]) == [0, 15]
    assert generated_subalgebra(A12, [0b01]) == [0, 1, 2, 3]


@pytest.mark.parametrize("dim,u,gens", [(2, 2, [0b0001]), (2, 2, [0b1001]), (2, 3, [0b100010001]),
                                         (1, 3, [0b001]), (2, 3, [0b000000111])])
def test_generated_subalgebra_matches_naive_closure(dim, u, gens):
    A = FullSetAlgebra.of(dim, u)
    assert generated_subalgebra(A, gens) == oracles.closure(dim, u, gens)


def test_generated_subalgebra_generic_path_agrees(A22):
    B = to_bao(A22)
    for gen in (0b0001, 0b1001, 0b0110):
        assert generated_subalgebra(B, [gen]) == generated_subalgebra(A22, [gen])


def test_neat_reduct_examples(A22):
    N = neat_reduct(A22, [0])
    assert N.dim == 1 and N.atom_count == 2
    sp = A22.space
    assert sorted(N.meta["embedding"]) == [0, sp.mask_of_points([(0, 0), (0, 1)]),
                                           sp.mask_of_points([(1, 0), (1, 1)]), 15]
    full = neat_reduct(A22, [0, 1])
    assert full.atom_count == 4 and full == to_bao(A22)
    empty = neat_reduct(A22, [])
    assert empty.dim == 0 and empty.atom_count == 1


def _restrict(mask, space, J):
    return {tuple(s[j] for j in J) for s in space.points_of_mask(mask)}


@pytest.mark.parametrize("dim,u", [(1, 2), (2, 2), (3, 2), (2, 1), (3, 1)])
def test_neat_reduct_isomorphic_to_lower_dimension(dim, u):
    A = FullSetAlgebra.of(dim, u)
    for bits in range(1 << dim):
        J = [i for i in range(dim) if bits >> i & 1]
        N = neat_reduct(A, J)
        B = FullSetAlgebra.of(len(J), u)
        phi = {}
        for m, e in enumerate(N.meta["embedding"]):
            phi[m] = B.space.mask_of_points(_restrict(e, A.space, J))
        assert sorted(phi.values()) == list(range(1 << B.nbits))
        for op in B.operators():
            for m in range(1 << N.nbits):
                assert phi[N.apply(op, m)] == B.apply(op, phi[m])


def test_partition_algebra_single_block():
    u = 3
    q1 = [(x, y) for x in range(u) for y in range(u) if x != y]
    P = partition_algebra(u, [[(x, x) for x in range(u)], q1], 1)
    assert P.r([1], 1) == P.algebra.unit
    assert P.subalgebra == [0, P.algebra.unit]


def _two_block(u=4):
    q1 = [(x, y) for x in range(u) for y in range(u) if x != y and x ^ y == 1]
    q2 = [(x, y) for x in range(u) for y in range(u) if x != y and x ^ y != 1]
    return [[(x, x) for x in range(u)], q1, q2]


def test_partition_algebra_two_blocks():
    blocks = _two_block()
    P = partition_algebra(4, blocks, 1)
    q2 = P.algebra.space.mask_of_points(blocks[2])
    assert P.r([2], 1) == q2
    assert q2 in P.subalgebra
    assert not any(e and e != q2 and e & q2 == e for e in P.subalgebra)
    for e in P.subalgebra:
        assert not e & ~P.algebra.unit


def test_partition_algebra_with_principal_ultrafilter_is_completely_representable():
    P = partition_algebra(4, _two_block(), 2)
    B = subalgebra_bao(P.algebra, P.subalgebra)
    assert oracle_complete_representability(B, 3).found


def test_partition_algebra_validation_lists_conditions():
    u = 3
    diag = [(x, x) for x in range(u)]
    with pytest.raises(MalformedInput, match="not symmetric"):
        partition_algebra(u, [diag, [(0, 1), (1, 2), (2, 0)]], 1)
    with pytest.raises(MalformedInput, match="cover"):
        partition_algebra(u, [diag, [(0, 1), (1, 0)]], 1)
    with pytest.raises(MalformedInput, match="diagonal"):
        partition_algebra(u, [[(0, 0)], [(x, y) for x in range(u) for y in range(u) if (x, y) != (0, 0)]], 1)
    with pytest.raises(MalformedInput, match="principal"):
        partition_algebra(u, [diag, [(x, y) for x in range(u) for y in range(u) if x != y]], 0)


def test_minimal_support_and_degrees(A22):
    sp = A22.space
    assert minimal_support(A22, sp.mask_of_points([(0, 0), (0, 1)])).to_list() == [0]
    assert minimal_support(A22, 0).to_list() == []
    rep = degree_report(A22)
    assert (rep.effective_degree, rep.local_degree, rep.effective_cardinality) == (2, 3, 16)


@given(st.integers(0, (1 << 8) - 1), st.integers(0, 2))
def test_minimal_support_of_cylinder_excludes_axis(x, i):
    A = FullSetAlgebra.of(3, 2)
    assert i not in minimal_support(A, A.cyl([i], x))


def test_degrees_refuse_relativized():
    A = FullSetAlgebra.of(2, 2, unit=0b0111)
    with pytest.raises(UnsupportedOperation):
        degree_report(A)


def test_finite_bao_validation():
    with pytest.raises(MalformedInput, match="missing"):
        FiniteBAO(1, 2, {}, {})
    with pytest.raises(MalformedInput, match="shape"):
        FiniteBAO(1, 2, {(0,): [0, 3, 3]}, {})
    with pytest.raises(MalformedInput, match="outside"):
        FiniteBAO(1, 2, {(0,): [0, 3, 3, 4]}, {})
    B = FiniteBAO(1, 2, {(0,): [0, 3, 3, 3]}, {})
    assert list(B.subst_table([0])) == [0, 1, 2, 3]


def test_atoms_mode_extends_additively():
    B = FiniteBAO.from_atom_images(1, 2, {(0,): [3, 3]}, {(0,): [1, 2]})
    assert B.mode == "atoms"
    assert list(B.cyl_table([0])) == [0, 3, 3, 3]


def test_to_bao_preserves_tables(A22):
    B = to_bao(A22)
    for op in A22.operators():
        assert np.array_equal(B.table(op), A22.table(op))


def test_non_additive_example_tables(g_alg):
    assert list(g_alg.subst_table([0])) == [0, 1, 2, 1]
    assert list(g_alg.cyl_table([0])) == [0, 3, 3, 3]


def test_subalgebra_closure_capacity():
    A = FullSetAlgebra.of(2, 5)
    path = A.space.mask_of_points([(0, 1), (1, 2), (2, 3), (3, 4)])
    with pytest.raises(CapacityError):
        generated_subalgebra(A, [path])
