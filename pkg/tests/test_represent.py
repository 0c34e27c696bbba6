import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from palg.algebra import FiniteBAO, FullSetAlgebra
from palg.core import Transformation
from palg.errors import CapacityError, MalformedInput
from palg.represent import (ARTIFACT_LABEL, RepresentationMap, atomic_representation,
                            henkin_construct, identity_representation, oracle_complete_representability,
                            verify_representation)

import gen
import oracles


def test_explicit_witness_example(A22):
    at = A22.space.mask_of_points([(0, 1)])
    f = henkin_construct(A22, 3, A22.unit, witness=([0, 1, 0], at))
    assert sorted(f.image_points(at)) == [(0, 1), (2, 1)]
    rep = verify_representation(A22, f)
    assert rep.is_complete_representation


def test_default_witness_on_full_algebra(A22):
    f = henkin_construct(A22, 3, A22.unit)
    assert f.meta["y0"] == [0, 1, 0] and f.meta["surjective"]
    assert f(A22.unit) == (1 << 9) - 1 and f(0) == 0
    rep = verify_representation(A22, f)
    assert rep.passed and rep.injective.passed and rep.atomic
    assert f.meta["gaps"]["avoids_all"]


def test_henkin_formula_matches_direct_enumeration(A22):
    at = 1 << 2
    f = henkin_construct(A22, 3, A22.unit, witness=([0, 1, 1], at))
    y0 = (0, 1, 1)
    for a in range(16):
        want = {tau for tau in itertools.product(range(3), repeat=2)
                if at & oracles.subst_mask([y0[t] for t in tau], a, 2, 2)}
        assert set(f.image_points(a)) == want


def test_failure_diagnosis_on_dimension_one(A12):
    f = henkin_construct(A12, 2, 0b10)
    assert f.meta["atom"] == 0b10 and not f.meta["surjective"]
    rep = verify_representation(A12, f)
    assert rep.failed_clauses() == ["cyl_hom"]
    assert rep.clauses["cyl_hom"].witness == {"gamma": [0], "x": "0x1"}
    assert rep.clauses["cyl_hom"].values == {"lhs": 0b11, "rhs": 0}
    assert not rep.injective.passed
    assert rep.diagnosis.startswith(ARTIFACT_LABEL)


def test_witness_validation(A22):
    with pytest.raises(MalformedInput, match="not below"):
        henkin_construct(A22, 3, 1, witness=([0, 1, 0], 2))
    with pytest.raises(MalformedInput, match="not an atom"):
        henkin_construct(A22, 3, 15, witness=([0, 1, 0], 3))
    with pytest.raises(MalformedInput, match="map"):
        henkin_construct(A22, 3, 15, witness=([0, 2, 0], 1))
    with pytest.raises(MalformedInput):
        henkin_construct(A22, 3, 0)
    with pytest.raises(MalformedInput):
        henkin_construct(A22, 2, 1)


@pytest.mark.parametrize("dim,u,beta", [(1, 1, 2), (2, 1, 3), (2, 2, 3), (2, 2, 4), (3, 2, 4)])
def test_representable_case_passes(dim, u, beta):
    A = FullSetAlgebra.of(dim, u)
    f = henkin_construct(A, beta, A.unit, record_gaps=dim < 3)
    assert f.meta["surjective"]
    assert verify_representation(A, f).is_complete_representation


SWEEP = [(1, 2, 2), (1, 3, 3), (2, 2, 3), (2, 3, 3), (2, 2, 4)]


@pytest.mark.parametrize("dim,u,beta", SWEEP)
def test_boolean_and_subst_clauses_always_hold(dim, u, beta):
    A = FullSetAlgebra.of(dim, u)
    rng = np.random.default_rng(dim * 100 + u * 10 + beta)
    for _ in range(6):
        c = int(rng.integers(1, A.unit + 1))
        y0 = [int(v) for v in rng.integers(0, dim, beta)]
        under = A.subst(Transformation(tuple(y0[:dim])), c)
        if not under:
            continue
        atoms = A.atoms_below(under)
        at = atoms[int(rng.integers(len(atoms)))]
        f = henkin_construct(A, beta, c, witness=(y0, at), record_gaps=False)
        rep = verify_representation(A, f)
        assert rep.clauses["boolean_hom"].passed and rep.clauses["subst_hom"].passed
        assert rep.clauses["completeness"].passed
        assert f(c) != 0
        ident = (1 << sum(i * beta ** (dim - 1 - i) for i in range(dim)))
        assert f(c) & ident


@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.integers(1, 3))
@settings(max_examples=25)
def test_completeness_under_postulate6(seed, dim, n):
    B = gen.random_p6(np.random.default_rng(seed), dim, n)
    f = henkin_construct(B, dim + 1, B.unit, record_gaps=False)
    assert verify_representation(B, f).clauses["completeness"].passed


def test_identity_representation(A22):
    rep = verify_representation(A22, identity_representation(A22))
    assert rep.is_complete_representation and rep.atomic


def test_representation_json_roundtrip(A22):
    f = henkin_construct(A22, 3, 15)
    g = RepresentationMap.from_json(A22, f.to_json())
    assert g.table == f.table and g.base == 3
    bad = f.to_json()
    del bad["table"]["0x0"]
    with pytest.raises(MalformedInput, match="misses"):
        RepresentationMap.from_json(A22, bad)
    with pytest.raises(MalformedInput):
        RepresentationMap.from_json(A22, {"base": 3})


def test_verifier_catches_broken_maps(A12):
    f = identity_representation(A12)
    broken = RepresentationMap(A12, f.target, {0: 0, 1: 1, 2: 1, 3: 3})
    rep = verify_representation(A12, broken)
    assert not rep.clauses["boolean_hom"].passed and not rep.injective.passed


def test_oracle_examples(A12):
    r = oracle_complete_representability(A12, 2)
    assert r.found and r.base == 2
    two = FiniteBAO(1, 1, {(0,): [0, 1]}, {})
    r = oracle_complete_representability(two, 1)
    assert r.found and r.base == 1 and r.coloring == (0,)


def test_oracle_rejects_postulate4_failure():
    # c(b . c a) = 0 but c b . c a = a
    B = FiniteBAO(1, 2, {(0,): [0, 1, 3, 3]}, {})
    assert not oracle_complete_representability(B, 3).found


def test_oracle_bounds():
    with pytest.raises(CapacityError):
        oracle_complete_representability(FullSetAlgebra.of(1, 3), 4)
    with pytest.raises(CapacityError):
        oracle_complete_representability(FullSetAlgebra.of(3, 1), 2)


def _naive(A, max_base):
    return oracles.naive_colorings_representable(
        A.dim, A.atoms(), lambda g, x: A.cyl(g, x), lambda t, x: A.subst(t, x),
        [g.to_list() for g in A.gammas()], [t.to_list() for t in A.taus()],
        [int(x) for x in A.carrier()], max_base)


def _small_cases():
    cases = [FullSetAlgebra.of(d, u) for d, u in [(1, 1), (1, 2), (2, 1), (2, 2)]]
    cases.append(FiniteBAO(1, 2, {(0,): [0, 1, 3, 3]}, {}))
    cases.append(FiniteBAO(1, 2, {(0,): [0, 3, 3, 3]}, {(0,): [0, 1, 2, 1]}))
    rng = np.random.default_rng(4)
    for _ in range(6):
        cases.append(gen.random_additive(rng, 1, 2))
    return cases


@pytest.mark.parametrize("k", range(12))
def test_oracle_matches_naive_search(k):
    A = _small_cases()[k]
    r = oracle_complete_representability(A, 3)
    naive = _naive(A, 3)
    assert r.found == (naive is not None)
    if r.found:
        assert (r.base, r.coloring) == (naive[0], tuple(naive[1]))
        rep = verify_representation(A, r.representation)
        assert rep.is_complete_representation
        assert rep.clauses["completeness"].passed == atomic_representation(A, r.representation)
