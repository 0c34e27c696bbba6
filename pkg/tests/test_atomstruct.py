import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from palg.algebra import FiniteBAO, FullSetAlgebra
from palg.atomstruct import (atom_structure, atom_structure_from_json, canonical_embedding_check,
                             complex_algebra, compute_atom_gap, compute_gap, family_join, gap_set,
                             minimal_completion, stone_basic)
from palg.dilation import Dilation
from palg.errors import MalformedInput, UnsupportedOperation
from palg.laws import additivity_sweep

import gen


def test_atom_structure_example(A12):
    S = atom_structure(A12)
    assert S.atoms == 2
    assert S.relation("c{0}") == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert S.relation("s[0]") == {(0, 0), (1, 1)}
    assert all(S.total().values())


@pytest.mark.parametrize("dim,u", [(1, 2), (1, 3), (2, 2)])
def test_complex_algebra_reproduces_full_set_algebras(dim, u):
    A = FullSetAlgebra.of(dim, u)
    cm = complex_algebra(atom_structure(A))
    for op in A.operators():
        assert np.array_equal(cm.table(op), A.table(op))
    assert canonical_embedding_check(A).passed


def test_json_roundtrip(A22):
    S = atom_structure(A22)
    T = atom_structure_from_json(S.to_json(), 2)
    assert T.relations == S.relations
    with pytest.raises(MalformedInput):
        atom_structure_from_json({"atoms": 2, "relations": {"c{0}": [[0, 5]]}}, 1)


def test_canonical_embedding_fails_on_g(g_alg):
    v = canonical_embedding_check(g_alg)
    assert not v.passed
    assert v.witness == {"element": 3}
    assert v.values == {"f(x)": 1, "f+(image(x))": 3}
    with pytest.raises(UnsupportedOperation):
        minimal_completion(g_alg)


def _mixed(seed, n):
    rng = np.random.default_rng(seed)
    kind = seed % 3
    if kind == 0:
        return gen.random_additive(rng, 1 + seed % 2, n)
    if kind == 1:
        return gen.random_tables(rng, 1 + seed % 2, n)
    A = gen.random_additive(rng, 1, n)
    tab = np.array(A.cyl_table([0]))
    x = int(rng.integers(1, 1 << n))
    tab[x] = int(rng.integers(0, 1 << n))
    return A.with_table("c{0}", tab)


@given(st.integers(0, 10 ** 6), st.integers(1, 8))
def test_roundtrip_iff_completely_additive(seed, n):
    A = _mixed(seed, n)
    additive = all(v.passed for v in additivity_sweep(A))
    cm = complex_algebra(atom_structure(A))
    assert (cm == A) == additive
    assert canonical_embedding_check(A).passed == additive
    if additive:
        assert minimal_completion(A) == A


@given(st.integers(0, 15), st.integers(0, 15))
def test_stone_basic_sets_form_a_boolean_algebra(a, b):
    A = FullSetAlgebra.of(2, 2)
    Na, Nb = stone_basic(A, a), stone_basic(A, b)
    assert stone_basic(A, a & b) == Na & Nb
    assert stone_basic(A, a | b) == Na | Nb
    assert stone_basic(A, A.complement(a)) == Na.complement()
    assert Na.is_empty() == (a == 0)
    assert len(stone_basic(A, A.unit)) == 4


def test_gap_examples(A12):
    assert compute_gap(A12, [0], 0b01, [[0]]).to_json() == [1]
    assert compute_gap(A12, [0], 0b01, []).to_json() == [0, 1]
    assert compute_gap(A12, [0], 0, [[0]]).is_empty()
    assert compute_atom_gap(A12, [0]).is_empty()


def test_atom_gap_detects_non_covering_substitution(g_alg):
    # s[0] of every atom still covers the unit
    assert compute_atom_gap(g_alg, [0]).is_empty()
    B = FiniteBAO(1, 2, {(0,): [0, 3, 3, 3]}, {(0,): [0, 1, 1, 1]})
    assert compute_atom_gap(B, [0]).to_json() == [1]


@given(st.integers(0, 15), st.data())
def test_gap_empty_iff_join_attained_base(p, data):
    A = FullSetAlgebra.of(2, 2)
    gamma = data.draw(st.sets(st.integers(0, 1)))
    off = [i for i in range(2) if i not in gamma]
    admissible = [t for t in A.taus() if all(t(i) == i for i in off)]
    fam = data.draw(st.lists(st.sampled_from(admissible), max_size=4))
    gap = compute_gap(A, sorted(gamma), p, fam)
    assert gap.is_empty() == (family_join(A, p, fam) == A.cyl(sorted(gamma), p))


def test_gap_on_dilation():
    D = Dilation(FullSetAlgebra.of(2, 2), 3)
    fam = D.admissible_taus([0])
    for p in range(16):
        gap = compute_gap(D, [0], p, fam)
        j = family_join(D, p, fam)
        assert gap.is_empty() == (j == D.dcyl([0], D.embed(p)))
        assert gap == gap_set(D, D.dcyl([0], D.embed(p)), [D.dsubst(t, D.embed(p)) for t in fam])
    for tau in itertools.product(range(3), repeat=2):
        assert compute_atom_gap(D, tau).is_empty()


def test_dilation_stone_set_needs_dilation_element():
    D = Dilation(FullSetAlgebra.of(1, 2), 2)
    with pytest.raises(MalformedInput):
        stone_basic(D, 3)
    assert len(stone_basic(D, D.unit())) == D.size * 2
