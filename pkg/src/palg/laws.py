"""The polyadic postulates and the additivity conditions as runnable checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import BAO, FullSetAlgebra, Operator, additive_extension, parse_operator
from .core import DimensionSet, Transformation, compose, popcount
from .errors import CapacityError, MalformedInput
from .termlang import (
    EXHAUSTIVE_MAX_CARRIER,
    And,
    Cyl,
    Equation,
    Not,
    One,
    Or,
    Subst,
    Var,
    Verdict,
    Zero,
    check_equation,
)

X, Y = Var("x"), Var("y")

POSTULATES = {
    "P1": "Boolean algebra",
    "P2": "c_(G) 0 = 0",
    "P3": "x <= c_(G) x",
    "P4": "c_(G)(x . c_(G) y) = c_(G) x . c_(G) y",
    "P5": "c_(G) c_(D) x = c_(G u D) x",
    "P6": "s_t is a Boolean endomorphism",
    "P7": "s_Id x = x",
    "P8": "s_(s o t) = s_s o s_t",
    "P9": "s|(a-G) = t|(a-G)  =>  s_s c_(G) x = s_t c_(G) x",
    "P10": "t^-1 G = D, t|D injective  =>  c_(G) s_t x = s_t c_(D) x",
}


@dataclass
class LawReport:
    law: str
    passed: bool
    instances: int = 0
    checked: int = 0
    witness: dict | None = None
    instance: dict = field(default_factory=dict)
    equation: str = ""
    values: dict | None = None
    note: str = ""

    @property
    def title(self) -> str:
        return POSTULATES.get(self.law, self.law)

    def to_json(self) -> dict:
        out = {"law": self.law, "title": self.title, "passed": self.passed,
               "instances": self.instances, "checked": self.checked}
        if not self.passed:
            out["witness"] = {k: hex(v) for k, v in (self.witness or {}).items()}
            out["instance"] = self.instance
            out["equation"] = self.equation
            if self.values:
                out["values"] = {k: hex(v) for k, v in self.values.items()}
        if self.note:
            out["note"] = self.note
        return out


def _c(gamma: DimensionSet, t):
    return Cyl(tuple(gamma.members), t)


def _s(tau: Transformation, t):
    return Subst.of(tau.entries, t)


def _eq(lhs, rhs, **instance) -> Equation:
    inst = {k: (v.to_list() if hasattr(v, "to_list") else v) for k, v in instance.items()}
    return Equation(lhs, rhs, instance=inst)


def boolean_identities() -> list[Equation]:
    """Eight two-variable Boolean identities used for table-backed carriers."""
    return [
        _eq(X + Y, Y + X, identity="commutativity of +"),
        _eq(X * Y, Y * X, identity="commutativity of ."),
        _eq(X + Zero(), X, identity="0 is neutral for +"),
        _eq(X * One(), X, identity="1 is neutral for ."),
        _eq(X + Not(X), One(), identity="x + -x = 1"),
        _eq(X * Not(X), Zero(), identity="x . -x = 0"),
        _eq(X + X * Y, X, identity="absorption"),
        _eq(X * (X + Y), X, identity="dual absorption"),
    ]


def postulate_instances(dim: int, law: str) -> list[Equation]:
    """Every instance of postulate ``law`` (``"P2"`` .. ``"P10"``) in dimension ``dim``."""
    gammas = list(DimensionSet.all(dim))
    taus = list(Transformation.all(dim))
    out: list[Equation] = []
    if law == "P2":
        out = [_eq(_c(g, Zero()), Zero(), Gamma=g) for g in gammas]
    elif law == "P3":
        out = [_eq(And(X, _c(g, X)), X, Gamma=g) for g in gammas]
    elif law == "P4":
        out = [_eq(_c(g, And(X, _c(g, Y))), And(_c(g, X), _c(g, Y)), Gamma=g) for g in gammas]
    elif law == "P5":
        out = [_eq(_c(g, _c(d, X)), _c(g.union(d), X), Gamma=g, Delta=d)
               for g in gammas for d in gammas]
    elif law == "P6":
        for t in taus:
            out.append(_eq(_s(t, Or(X, Y)), Or(_s(t, X), _s(t, Y)), tau=t, clause="join"))
            out.append(_eq(_s(t, Not(X)), Not(_s(t, X)), tau=t, clause="complement"))
    elif law == "P7":
        out = [_eq(_s(Transformation.identity(dim), X), X)]
    elif law == "P8":
        out = [_eq(_s(s, _s(t, X)), _s(compose(s, t), X), sigma=s, tau=t)
               for s in taus for t in taus]
    elif law == "P9":
        for g in gammas:
            off = [i for i in range(dim) if i not in g]
            for s in taus:
                for t in taus:
                    if s != t and all(s(i) == t(i) for i in off):
                        out.append(_eq(_s(s, _c(g, X)), _s(t, _c(g, X)), Gamma=g, sigma=s, tau=t))
    elif law == "P10":
        for t in taus:
            for g in gammas:
                delta = DimensionSet(dim, t.preimage(g.members))
                if len(t.image(delta.members)) == len(delta):
                    out.append(_eq(_c(g, _s(t, X)), _s(t, _c(delta, X)), Gamma=g, Delta=delta, tau=t))
    else:
        raise ValueError(f"unknown postulate {law!r}")
    return out


def _run(A: BAO, law: str, equations: Sequence[Equation], mode, seed, count) -> LawReport:
    checked = 0
    for eq in equations:
        v = check_equation(A, eq, mode, seed, count)
        checked += v.checked
        if not v.passed:
            return LawReport(law, False, len(equations), checked, v.witness,
                             v.instance, v.equation, v.values)
    return LawReport(law, True, len(equations), checked)


MAX_AXIOM_DIM = 3


def axiom_suite(A: BAO, mode: str = "exhaustive", seed: int = 0, count: int = 256) -> list[LawReport]:
    """Check postulates 1-10 over every metavariable instance."""
    if A.dim > MAX_AXIOM_DIM:
        raise CapacityError(f"axiom suite supports dimension <= {MAX_AXIOM_DIM}")
    if mode == "exhaustive" and A.carrier_size > EXHAUSTIVE_MAX_CARRIER:
        raise CapacityError(f"exhaustive axiom suite needs at most {EXHAUSTIVE_MAX_CARRIER} elements")
    reports = []
    if isinstance(A, FullSetAlgebra):
        reports.append(LawReport("P1", True, 1, 1, note="powerset of the unit (structural)"))
    else:
        reports.append(_run(A, "P1", boolean_identities(), mode, seed, count))
    for k in range(2, 11):
        law = f"P{k}"
        reports.append(_run(A, law, postulate_instances(A.dim, law), mode, seed, count))
    return reports


# --- additivity and the psi schema --------------------------------------------

def additivity_check(A: BAO, op) -> Verdict:
    """Normality plus binary additivity of one operator.

    On a finite algebra this is complete additivity.  A failure reports the
    pair ``(x, y)`` built from the smallest element (by size, then mask) on
    which the operator differs from its additive extension: ``x`` is that
    element's lowest atom and ``y`` the rest.
    """
    op = parse_operator(op, A.dim)
    A._check_op(op)
    T = A.table(op)
    carr = A.carrier()
    label = f"additivity {op.key()}"
    if T[0] != 0:
        return Verdict(False, 1, {"x": 0}, label, {"op": op.key()},
                       values={"f(0)": int(T[0])}, note="not normal: f(0) != 0")
    images = [int(T[1 << k]) if A.unit >> k & 1 else 0 for k in range(A.nbits)]
    ext = additive_extension(images, A.nbits)
    bad = carr[T[carr] != ext[carr]]
    if not len(bad):
        return Verdict(True, len(carr), label=label, instance={"op": op.key()})
    xs = sorted((popcount(int(b)), int(b)) for b in bad)
    worst = xs[0][1]
    a = worst & -worst
    y = worst ^ a
    return Verdict(False, len(carr), {"x": a, "y": y}, label, {"op": op.key()},
                   values={"f(x+y)": int(T[worst]), "f(x)+f(y)": int(T[a] | T[y])},
                   note="f(x+y) != f(x)+f(y)")


def additivity_sweep(A: BAO, ops: Iterable | None = None) -> list[Verdict]:
    return [additivity_check(A, op) for op in (ops if ops is not None else A.operators())]


def atom_join(A: BAO, tau) -> int:
    """``sum{ s_tau x : x an atom }``."""
    T = A.subst_table(tau)
    out = 0
    for a in A.atoms():
        out |= int(T[a])
    return out


def psi_schema_check(A: BAO, tau) -> Verdict:
    """``y != 0  ->  exists atom x with s_tau x . y != 0``, swept over all ``y``.

    This is the form used in the proof of the axiomatization; its failure
    witness is the least nonzero ``y`` meeting no substituted atom.
    """
    op = Operator.subst(tau, A.dim)
    T = A.table(op)
    carr = A.carrier()
    images = np.array([T[a] for a in A.atoms()], dtype=np.int64)
    nonzero = carr[carr != 0]
    if len(images):
        hit = ((nonzero[:, None] & images[None, :]) != 0).any(axis=1)
    else:
        hit = np.zeros(len(nonzero), dtype=bool)
    label = f"psi {op.key()}"
    missed = nonzero[~hit]
    if len(missed):
        return Verdict(False, len(nonzero), {"y": int(missed[0])}, label, {"tau": op.arg.to_list()},
                       note="no substituted atom meets y")
    return Verdict(True, len(nonzero), label=label, instance={"tau": op.arg.to_list()})


def schema_sweep(A: BAO, include_bijections: bool = False) -> list[Verdict]:
    """``psi_tau`` for every ``tau``; bijections are self-conjugate and skipped by default."""
    return [psi_schema_check(A, t) for t in A.taus()
            if include_bijections or not t.is_bijective()]


# --- omitting meets ---------------------------------------------------------------

@dataclass
class OmissionVerdict:
    passed: bool
    checked: int
    skipped: int
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"passed": self.passed, "checked": self.checked, "skipped": self.skipped,
                "violations": [[hex(y) for y in fam] for fam in self.violations],
                "notes": self.notes}


def omission_check(A: BAO, rep, families: Iterable[Iterable[int]]) -> OmissionVerdict:
    """For each family with meet 0 in ``A``, its image must have empty intersection.

    ``rep`` is any callable mapping an element of ``A`` to a target mask
    (a :class:`~palg.represent.RepresentationMap` qualifies).
    """
    checked = skipped = 0
    violations, notes = [], []
    for k, fam in enumerate(families):
        fam = [int(y) for y in fam]
        for y in fam:
            if not A.contains(y):
                raise MalformedInput(f"family {k} contains {y:#x}, which is not an element of the algebra")
        meet = A.unit
        for y in fam:
            meet &= y
        if meet:
            skipped += 1
            notes.append(f"family {k}: meet is {meet:#x} != 0, skipped")
            continue
        checked += 1
        inter = rep.target_unit if hasattr(rep, "target_unit") else None
        for y in fam:
            img = rep(y)
            inter = img if inter is None else inter & img
        if inter:
            violations.append(fam)
    return OmissionVerdict(not violations, checked, skipped, violations, notes)
