import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from palg.errors import CapacityError, DimensionError, MalformedInput, ParseError
from palg.lofin import (CofiniteTransformation, FiniteSupportRelation, compose, fresh_witness_identity,
                        kernel_rectangle, lf_axiom_sweep, lf_cyl, lf_subst, parse_coords, parse_literal,
                        random_relation, rectangle, split_below, to_literal, unit, zero)
from palg.rng import SplitMix64


def lit(text, base=2):
    return parse_literal(text, base)


# --- windowed reference semantics ------------------------------------------------

def member(x, s):
    return bool(x.table[tuple(s[c] for c in x.support)])


def assignments(base, window):
    window = sorted(window)
    for vals in itertools.product(range(base), repeat=len(window)):
        yield dict(zip(window, vals))


def ref_cyl(gamma, x, s):
    inner = [c for c in x.support if c in gamma]
    for vals in itertools.product(range(x.base), repeat=len(inner)):
        t = dict(s)
        t.update(zip(inner, vals))
        if member(x, t):
            return True
    return False


def ref_subst(tau, x, s):
    # (s o tau)(d) = s(tau(d)); only the support of x is read
    return member(x, {d: s[tau(d)] for d in x.support})


# --- examples --------------------------------------------------------------------

def test_boolean_examples():
    x, y = lit("s(0)=0"), lit("s(1)=1")
    z = x & y
    assert z.support == (0, 1) and z.rows() == [(0, 1)]
    assert (~unit(2)).is_zero()
    w = x | ~x
    assert w.is_unit() and w.support == ()


def test_cyl_examples():
    assert lf_cyl([0], lit("s(0)=0")).is_unit()
    x = lit("s(0)=0")
    assert lf_cyl([3], x) == x
    assert lf_cyl([1], lit("s(0)=0 & s(1)=1")) == lit("s(0)=0")


def test_subst_examples():
    assert lf_subst(CofiniteTransformation.of({0: 5}), lit("s(0)=0")) == lit("s(5)=0")
    x = lit("s0 in {0,1} & s1 in {1,2}", 3)
    assert lf_subst(CofiniteTransformation.of({1: 0}), x) == lit("s0 in {1}", 3)
    assert lf_subst(CofiniteTransformation.identity(), x) == x


def test_fresh_witness_examples():
    v = fresh_witness_identity(lit("s(0)=0"), [0], {0: 7})
    assert v.passed
    assert fresh_witness_identity(lit("s(0)=0"), [], {}).passed
    x = lit("s(0)=0 & s(1)=1")
    assert fresh_witness_identity(x, [0], {0: 9}).passed
    assert lf_cyl([0], x) == lit("s(1)=1")


def test_fresh_witness_preconditions():
    x = lit("s(0)=0 & s(1)=1")
    with pytest.raises(MalformedInput, match="exactly"):
        fresh_witness_identity(x, [0], {1: 5})
    with pytest.raises(MalformedInput, match="injective"):
        fresh_witness_identity(x, [0, 2], {0: 5, 2: 5})
    with pytest.raises(MalformedInput, match="meet"):
        fresh_witness_identity(x, [0], {0: 1})


def test_kernel_rectangle_example():
    tau = CofiniteTransformation.of({1: 0, 2: 4})
    got = kernel_rectangle(tau, {0: [0, 1], 1: [1, 2], 2: [2]})
    assert got == {0: {1}, 4: {2}}


# --- properties --------------------------------------------------------------------

def relations(base=2, coords=6, max_support=3):
    @st.composite
    def build(draw):
        sup = sorted(draw(st.sets(st.integers(0, coords - 1), max_size=max_support)))
        bits = draw(st.lists(st.booleans(), min_size=base ** len(sup), max_size=base ** len(sup)))
        return FiniteSupportRelation(base, tuple(sup), np.array(bits, dtype=bool).reshape((base,) * len(sup)))
    return build()


def transformations(coords=6):
    return st.dictionaries(st.integers(0, coords - 1), st.integers(0, coords + 1), max_size=3).map(
        CofiniteTransformation.of)


@given(st.integers(1, 3).flatmap(lambda b: st.tuples(st.just(b), relations(b), relations(b))),
       st.sets(st.integers(0, 5), max_size=3))
def test_operations_match_windowed_reference(triple, gamma):
    base, x, y = triple
    window = set(x.support) | set(y.support) | gamma | {6}
    for s in assignments(base, window):
        assert member(x & y, s) == (member(x, s) and member(y, s))
        assert member(x | y, s) == (member(x, s) or member(y, s))
        assert member(~x, s) == (not member(x, s))
        assert member(lf_cyl(gamma, x), s) == ref_cyl(gamma, x, s)


@given(relations(2), transformations())
def test_subst_matches_windowed_reference(x, tau):
    out = lf_subst(tau, x)
    window = set(out.support) | {tau(d) for d in x.support} | {0}
    for s in assignments(2, window):
        assert member(out, s) == ref_subst(tau, x, s)


@given(relations(2, max_support=4))
def test_normalization_is_minimal_and_sound(x):
    for k, c in enumerate(x.support):
        # every kept coordinate matters
        assert not (x.table.all(axis=k) == x.table.any(axis=k)).all()
    extra = tuple(sorted(set(x.support) | {7, 8}))
    shape = [2 if c in x.support else 1 for c in extra]
    wide = np.broadcast_to(x.table.reshape(shape), (2,) * len(extra))
    assert FiniteSupportRelation(2, extra, wide) == x


@given(relations(2), transformations(), transformations())
def test_subst_respects_composition(x, s, t):
    assert lf_subst(s, lf_subst(t, x)) == lf_subst(compose(s, t), x)
    assert compose(s, t).compose(CofiniteTransformation.identity()) == compose(s, t)


@given(relations(3, max_support=3), st.data())
def test_fresh_witness_identity_holds(x, data):
    gamma = sorted(data.draw(st.sets(st.integers(0, 5), max_size=3)))
    used = set(x.support) | set(gamma)
    pool = [c for c in range(20) if c not in used]
    targets = data.draw(st.permutations(pool))[: len(gamma)]
    assert fresh_witness_identity(x, gamma, dict(zip(gamma, targets))).passed


@given(relations(2))
def test_local_finiteness(x):
    assert lf_cyl(set(x.support) | {11}, x) in (zero(2), unit(2))


@given(relations(3))
def test_atomless_below_nonzero_non_unit(x):
    if x.is_zero() or x.is_unit():
        with pytest.raises(MalformedInput):
            split_below(x)
        return
    y = split_below(x)
    assert not y.is_zero() and y <= x and y != x


def test_rectangle_and_errors():
    r = rectangle(3, {2: [0, 2], 0: [1]})
    assert r.support == (0, 2) and sorted(r.rows()) == [(1, 0), (1, 2)]
    assert rectangle(3, {1: [0, 1, 2]}).is_unit()
    with pytest.raises(DimensionError):
        rectangle(2, {0: [2]})
    with pytest.raises(DimensionError):
        lit("s0=0", 2) & lit("s0=0", 3)
    with pytest.raises(MalformedInput):
        FiniteSupportRelation(2, (1, 0), np.zeros((2, 2), dtype=bool))


def test_alignment_capacity():
    rng = np.random.default_rng(0)
    wide = FiniteSupportRelation(2, tuple(range(22)), rng.random((2,) * 22) < 0.5)
    with pytest.raises(CapacityError):
        wide & lit("s22=0")


def test_literal_syntax():
    assert lit("s(0)=0") == lit("s0 in {0}") == lit("!(s0 = 1)")
    assert lit("s0=0 | s1=1 & s2=0") == lit("s0=0") | (lit("s1=1") & lit("s2=0"))
    assert lit("true").is_unit() and lit("false").is_zero() and lit("s3 in {}").is_zero()
    assert lit("~s0=1") == lit("s0=0")


@pytest.mark.parametrize("text,offset", [("s0 = ", 5), ("s0 in {0, x}", 6), ("s0 < 1", 3),
                                         ("s0=0 &", 6), ("(s0=0", 5), ("s0=2", 0), ("", 0), ("s0=0 s1=1", 5), ("s0=0 & é", 7)])
def test_literal_errors(text, offset):
    with pytest.raises(ParseError) as e:
        parse_literal(text, 2)
    assert e.value.offset == offset


@given(relations(3))
def test_literal_and_json_roundtrip(x):
    assert parse_literal(to_literal(x), 3) == x
    assert FiniteSupportRelation.from_json(x.to_json()) == x


def test_transformation_json():
    t = CofiniteTransformation.of({0: 3, 2: 2})
    assert t.to_json() == {"map": {"0": 3}, "tail": "identity"}
    assert CofiniteTransformation.from_json(t.to_json()) == t
    with pytest.raises(MalformedInput):
        CofiniteTransformation.from_json({"map": {}, "tail": "constant"})
    with pytest.raises(MalformedInput):
        CofiniteTransformation(((0, 1), (0, 2)))
    assert parse_coords("{0, 3}") == {0, 3} and parse_coords("[]") == frozenset()


@pytest.mark.parametrize("base", [1, 2, 3])
def test_axiom_sweep(base):
    reports = lf_axiom_sweep(base, 60, seed=base)
    assert [r.law for r in reports] == [f"P{k}" for k in range(1, 11)]
    assert all(r.passed for r in reports), [r.to_json() for r in reports if not r.passed]


def test_axiom_sweep_limits():
    with pytest.raises(CapacityError):
        lf_axiom_sweep(5, 1)
    with pytest.raises(CapacityError):
        lf_axiom_sweep(2, 1, max_support=7)


def test_random_relation_is_deterministic():
    a = [random_relation(SplitMix64(9), 3) for _ in range(1)]
    b = [random_relation(SplitMix64(9), 3) for _ in range(1)]
    assert a == b
