"""Atom structures, complex algebras and the finite Stone-space apparatus.

Every ultrafilter of a finite Boolean algebra is principal, so a Stone set is
stored as a set of atoms.  For a dilation the atoms are pairs
``(coordinate index, atom bit of A)``.  In a finite discrete space only the
empty set is nowhere dense, so a nonempty gap set at this scale means the
corresponding join is not attained.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import BAO, FiniteBAO, parse_operator, to_bao
from .core import Transformation, as_dimset, iter_bits
from .dilation import Dilation, DilationElement
from .errors import DimensionError, MalformedInput, UnsupportedOperation
from .laws import additivity_check
from .termlang import Verdict

GAP_NOTE = ("finite Stone space: a nonempty gap means the join falls short; "
            "only the empty set is nowhere dense here")


@dataclass(frozen=True)
class AtomStructure:
    """Atoms ``0..n-1`` with a relation ``R_f = {(a, b) : a <= f(b)}`` per operator."""

    dim: int
    atoms: int
    relations: dict = field(hash=False)  # Operator -> frozenset[(a, b)]
    masks: tuple = ()  # original mask of each atom in the source algebra

    def relation(self, op) -> frozenset:
        op = parse_operator(op, self.dim)
        return self.relations[op]

    def total(self) -> dict:
        """Per operator: does every atom ``b`` have some ``a`` with ``a R_f b``."""
        out = {}
        for op, rel in self.relations.items():
            out[op.key()] = {b for _, b in rel} == set(range(self.atoms))
        return out

    def to_json(self) -> dict:
        return {"atoms": self.atoms,
                "relations": {op.key(): sorted([a, b] for a, b in rel)
                              for op, rel in self.relations.items()}}


def atom_structure(A: BAO) -> AtomStructure:
    B = to_bao(A)
    rel = {}
    for op in B.operators():
        T = B.table(op)
        rel[op] = frozenset((a, b) for b in range(B.atom_count)
                            for a in iter_bits(int(T[1 << b])))
    emb = B.meta.get("embedding")
    masks = tuple(int(emb[1 << k]) if emb is not None else 1 << k for k in range(B.atom_count))
    return AtomStructure(A.dim, B.atom_count, rel, masks)


def atom_structure_from_json(obj, dim: int) -> AtomStructure:
    n = int(obj["atoms"])
    rel = {}
    for key, pairs in obj["relations"].items():
        op = parse_operator(key, dim)
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise MalformedInput(f"relation {key} pair {[a, b]} is outside {n} atoms")
        rel[op] = frozenset((int(a), int(b)) for a, b in pairs)
    return AtomStructure(dim, n, rel)


def complex_algebra(S: AtomStructure) -> FiniteBAO:
    """``f+(X) = {a : (a, b) in R_f for some b in X}``; completely additive by construction."""
    cyl, subst = {}, {}
    for op, rel in S.relations.items():
        images = [0] * S.atoms
        for a, b in rel:
            images[b] |= 1 << a
        if op.kind == "c":
            cyl[tuple(sorted(op.arg.members))] = images
        else:
            subst[op.arg.entries] = images
    return FiniteBAO.from_atom_images(S.dim, S.atoms, cyl, subst, meta={"name": "complex algebra"})


def minimal_completion(A: BAO) -> FiniteBAO:
    """``Cm At A`` for a completely additive ``A``; refuses otherwise."""
    for op in A.operators():
        v = additivity_check(A, op)
        if not v.passed:
            raise UnsupportedOperation(
                f"{op.key()} is not completely additive (witness {v.witness}); "
                "no minimal completion is constructed for such algebras")
    return complex_algebra(atom_structure(A))


def canonical_embedding_check(A: BAO) -> Verdict:
    """Is ``a -> {x in At A : x <= a}`` a homomorphism into ``Cm At A``."""
    B = to_bao(A)
    cm = complex_algebra(atom_structure(A))
    carr = B.carrier()
    embedding = B.meta.get("embedding")
    checked = 0
    for op in B.operators():
        T, U = B.table(op), cm.table(op)
        checked += len(carr)
        bad = np.flatnonzero(T[carr] != U[carr])
        if len(bad):
            x = int(carr[bad[0]])
            orig = int(embedding[x]) if embedding is not None else x
            return Verdict(False, checked, {"element": orig}, f"canonical embedding {op.key()}",
                           {"op": op.key()},
                           values={"f(x)": int(T[x]), "f+(image(x))": int(U[x])},
                           note="images diverge (values in atoms of the source)")
    return Verdict(True, checked, label="canonical embedding")


# --- Stone sets -------------------------------------------------------------------

@dataclass(frozen=True)
class StoneSet:
    points: frozenset
    universe: frozenset

    def __and__(self, other):
        return StoneSet(self.points & other.points, self.universe)

    def __or__(self, other):
        return StoneSet(self.points | other.points, self.universe)

    def __sub__(self, other):
        return StoneSet(self.points - other.points, self.universe)

    def complement(self):
        return StoneSet(self.universe - self.points, self.universe)

    def __len__(self):
        return len(self.points)

    def __bool__(self):
        return bool(self.points)

    def is_empty(self) -> bool:
        return not self.points

    def to_json(self):
        return sorted(list(p) if isinstance(p, tuple) else p for p in self.points)


def _universe(B) -> frozenset:
    if isinstance(B, Dilation):
        bits = list(iter_bits(B.A.unit))
        return frozenset((k, b) for k in range(B.size) for b in bits)
    return frozenset(iter_bits(B.unit))


def stone_basic(B, b) -> StoneSet:
    """``N_b``: the ultrafilters (atoms) below ``b``."""
    if isinstance(B, Dilation):
        if not isinstance(b, DilationElement):
            raise MalformedInput("dilation Stone sets need a dilation element")
        pts = frozenset((int(k), bit) for k in np.flatnonzero(b.values) for bit in iter_bits(int(b.values[k])))
        return StoneSet(pts, _universe(B))
    b = int(b)
    if not B.contains(b):
        raise MalformedInput(f"{b:#x} is not an element of the algebra")
    return StoneSet(frozenset(iter_bits(b)), _universe(B))


def gap_set(B, bound, joinands: Iterable) -> StoneSet:
    """``N_bound`` minus the union of ``N_j``."""
    g = stone_basic(B, bound)
    for j in joinands:
        g = g - stone_basic(B, j)
    return g


def _base_tau(tau, dim: int) -> Transformation:
    t = tau if isinstance(tau, Transformation) else Transformation(tuple(tau))
    if t.dim != dim:
        raise DimensionError(f"{t!r} used in dimension {dim}")
    return t


def compute_gap(B, gamma, p, family: Sequence) -> StoneSet:
    """``G = N_{c_(G) p}`` minus the union of ``N_{s_tau p}`` over ``family``.

    ``B`` is a finite algebra (``tau`` in ``^alpha alpha``) or a
    :class:`Dilation` (``p`` an element of the base algebra, ``tau`` in
    ``^alpha beta`` barred, or a full map on ``beta``).
    """
    if isinstance(B, Dilation):
        e = B.embed(p)
        bound = B.dcyl(gamma, e)
        joinands = [B.dsubst(t, e) for t in family]
        return gap_set(B, bound, joinands)
    g = as_dimset(gamma, B.dim)
    bound = B.cyl(g, p)
    return gap_set(B, bound, [B.subst(_base_tau(t, B.dim), p) for t in family])


def compute_atom_gap(B, tau) -> StoneSet:
    """``G_tau = S`` minus the union of ``N_{s_tau x}`` over the atoms ``x`` of the base."""
    if isinstance(B, Dilation):
        joinands = [B.dsubst(tau, B.embed(a)) for a in B.A.atoms()]
        return gap_set(B, B.unit(), joinands)
    t = _base_tau(tau, B.dim)
    return gap_set(B, B.unit, [B.subst(t, a) for a in B.atoms()])


def family_join(B, p, family: Sequence):
    """The finite join the gap set is measured against."""
    if isinstance(B, Dilation):
        e = B.embed(p)
        out = B.zero()
        for t in family:
            out = out | B.dsubst(t, e)
        return out
    out = 0
    for t in family:
        out |= B.subst(_base_tau(t, B.dim), p)
    return out
