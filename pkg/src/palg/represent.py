"""The ultrafilter representation construction, a verifier and a brute-force oracle.

``henkin_construct`` realizes the map ``f(a) = {tau : s_taubar E(a) in F}`` for
the principal ultrafilter ``F`` of the dilation generated by an atom
``(y0, at)``.  Unwinding the definitions, ``tau`` is in ``f(a)`` exactly when
``at <= s_{y0 o tau} a``, which is how the table is computed.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import BAO, FullSetAlgebra
from .atomstruct import compute_atom_gap, compute_gap
from .core import PointSpace, Transformation, iter_bits, popcount
from .dilation import Dilation
from .errors import CapacityError, MalformedInput
from .termlang import Verdict

log = logging.getLogger(__name__)

ARTIFACT_LABEL = "finite-dimension artifact"
CLAUSES = ("boolean_hom", "subst_hom", "cyl_hom", "completeness")
MAX_GAP_CARRIER = 256


@dataclass
class RepresentationMap:
    source: BAO
    target: FullSetAlgebra
    table: dict  # source mask -> target mask
    meta: dict = field(default_factory=dict)

    def __call__(self, a: int) -> int:
        try:
            return self.table[int(a)]
        except KeyError:
            raise MalformedInput(f"{int(a):#x} is not in the domain of the representation") from None

    @property
    def base(self) -> int:
        return self.target.base

    @property
    def target_unit(self) -> int:
        return self.target.unit

    def image_points(self, a: int) -> list[tuple[int, ...]]:
        return self.target.space.points_of_mask(self(a))

    def to_json(self) -> dict:
        return {"base": self.base, "dim": self.target.dim,
                "table": {hex(k): hex(v) for k, v in sorted(self.table.items())}}

    @classmethod
    def from_json(cls, source: BAO, obj: Mapping) -> "RepresentationMap":
        try:
            base, dim = int(obj["base"]), int(obj["dim"])
            raw = obj["table"]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"representation file needs base, dim and table: {exc}") from None
        if dim != source.dim:
            raise MalformedInput(f"representation of dimension {dim} for an algebra of dimension {source.dim}")
        target = FullSetAlgebra.of(dim, base)
        table = {}
        for k, v in raw.items():
            x, y = int(str(k), 0), int(str(v), 0) if isinstance(v, str) else int(v)
            if not source.contains(x):
                raise MalformedInput(f"{x:#x} is not an element of the source algebra")
            if not target.contains(y):
                raise MalformedInput(f"{y:#x} is not a set of points of ^{dim}{base}")
            table[x] = y
        missing = [int(x) for x in source.carrier() if int(x) not in table]
        if missing:
            raise MalformedInput(f"representation table misses {len(missing)} elements, first {missing[0]:#x}")
        return cls(source, target, table)


# --- construction -------------------------------------------------------------------

def default_y0(alpha: int, beta: int) -> tuple[int, ...]:
    """``y0(i) = i`` below ``alpha`` and ``y0(alpha + k) = k mod alpha`` above."""
    return tuple(range(alpha)) + tuple(k % alpha for k in range(beta - alpha))


def point_map(A: FullSetAlgebra, at: int, y0: Sequence[int]) -> tuple[int, ...]:
    """For a set algebra atom ``at = {s}``, the map ``g = s o y0: beta -> U``."""
    s = A.space.decode(at.bit_length() - 1)
    return tuple(s[j] for j in y0)


def default_atom(A: BAO, y0: Sequence[int], c: int) -> int:
    """Atom under ``s_{y0|alpha} c``.

    For set algebras, the least atom whose point map has the largest range;
    otherwise the least atom.
    """
    alpha = A.dim
    under = A.subst(Transformation(tuple(y0[:alpha])), c)
    cands = A.atoms_below(under)
    if not cands:
        raise MalformedInput(f"no atom lies below s_y0 c = {under:#x}")
    if isinstance(A, FullSetAlgebra):
        return max(cands, key=lambda a: (len(set(point_map(A, a, y0))), -a))
    return cands[0]


def _check_witness(A: BAO, beta: int, c: int, y0, at):
    y0 = tuple(int(v) for v in y0)
    if len(y0) != beta or any(not 0 <= v < A.dim for v in y0):
        raise MalformedInput(f"witness y0={list(y0)} is not a map from {beta} to {A.dim}")
    at = int(at)
    if popcount(at) != 1 or not A.contains(at):
        raise MalformedInput(f"witness atom {at:#x} is not an atom")
    under = A.subst(Transformation(y0[: A.dim]), c)
    if not at & under:
        raise MalformedInput(f"witness atom {at:#x} is not below s_y0 c = {under:#x}")
    return y0, at


def henkin_construct(A: BAO, beta: int, c: int, witness=None, record_gaps: bool = True) -> RepresentationMap:
    """Build ``f(a) = {tau in ^alpha beta : at <= s_{y0 o tau} a}``.

    ``witness`` is an optional ``(y0, at)`` pair; the default choice is
    documented in :func:`default_y0` and :func:`default_atom`.
    """
    c = int(c)
    if not A.contains(c):
        raise MalformedInput(f"{c:#x} is not an element of the algebra")
    if c == 0:
        raise MalformedInput("c must be nonzero")
    D = Dilation(A, beta)
    alpha = A.dim
    if witness is None:
        y0 = default_y0(alpha, beta)
        at = default_atom(A, y0, c)
    else:
        y0, at = _check_witness(A, beta, c, *witness)
    target = FullSetAlgebra.of(alpha, beta)
    taus = target.space.coords  # row k is the k-th map alpha -> beta
    square = PointSpace(alpha, alpha)
    y0a = np.array(y0, dtype=np.int64)
    composed = square.encode_rows(y0a[taus])  # index of y0 o tau in ^alpha alpha
    carr = A.carrier()
    npoints = target.space.point_count
    member = np.zeros((len(carr), npoints), dtype=bool)
    for k in range(npoints):
        pi = D._taus[int(composed[k])]
        member[:, k] = (A.subst_table(pi)[carr] & at) != 0
    table = {}
    weights = [1 << k for k in range(npoints)]
    for row, x in zip(member, carr):
        table[int(x)] = sum(w for w, b in zip(weights, row) if b)
    meta = {"beta": beta, "c": c, "y0": list(y0), "atom": at,
            "ultrafilter": {"y_index": D.y_index(y0), "atom": at}}
    if isinstance(A, FullSetAlgebra):
        g = point_map(A, at, y0)
        meta["point_map"] = list(g)
        meta["surjective"] = len(set(g)) == A.base
    rep = RepresentationMap(A, target, table, meta)
    if not table[c]:
        raise AssertionError("construction invariant broken: f(c) is empty")
    if record_gaps:
        meta["gaps"] = _gap_record(D, A, y0, at)
    return rep


def _gap_record(D: Dilation, A: BAO, y0, at) -> dict:
    point = (D.y_index(y0), at.bit_length() - 1)
    if A.carrier_size > MAX_GAP_CARRIER:
        return {"skipped": f"carrier larger than {MAX_GAP_CARRIER}"}
    nonempty_cyl = hits_cyl = 0
    first = None
    for g in A.gammas():
        if not g.members:
            continue
        fam = D.admissible_taus(g.members)
        for p in A.carrier():
            gap = compute_gap(D, g.members, int(p), fam)
            if gap:
                nonempty_cyl += 1
                if point in gap.points:
                    hits_cyl += 1
                    if first is None:
                        first = {"gamma": g.to_list(), "p": hex(int(p))}
    nonempty_atom = hits_atom = 0
    for tau in itertools.product(range(D.beta), repeat=D.alpha):
        gap = compute_atom_gap(D, tau)
        if gap:
            nonempty_atom += 1
            hits_atom += point in gap.points
    return {"cyl_gaps_nonempty": nonempty_cyl, "cyl_gaps_containing_F": hits_cyl,
            "atom_gaps_nonempty": nonempty_atom, "atom_gaps_containing_F": hits_atom,
            "avoids_all": hits_cyl == 0 and hits_atom == 0, "first_cyl_gap_hit": first}


# --- verification --------------------------------------------------------------------

@dataclass
class ClauseVerdict:
    clause: str
    passed: bool
    checked: int = 0
    witness: dict | None = None
    values: dict | None = None

    def to_json(self):
        out = {"clause": self.clause, "passed": self.passed, "checked": self.checked}
        if not self.passed:
            out["witness"] = self.witness
            if self.values:
                out["values"] = {k: hex(v) for k, v in self.values.items()}
        return out


@dataclass
class VerifierReport:
    clauses: dict  # name -> ClauseVerdict
    injective: ClauseVerdict
    atomic: bool
    diagnosis: str = ""

    @property
    def passed(self) -> bool:
        """Every homomorphism clause and completeness."""
        return all(v.passed for v in self.clauses.values())

    @property
    def is_complete_representation(self) -> bool:
        return self.passed and self.injective.passed

    def failed_clauses(self) -> list[str]:
        return [k for k, v in self.clauses.items() if not v.passed]

    def to_json(self):
        out = {"passed": self.passed, "complete_representation": self.is_complete_representation,
               "clauses": {k: v.to_json() for k, v in self.clauses.items()},
               "injective": self.injective.to_json(), "atomic": self.atomic}
        if self.diagnosis:
            out["diagnosis"] = self.diagnosis
        return out


def _hex_inst(**kw):
    return {k: (hex(v) if isinstance(v, int) else v) for k, v in kw.items()}


def verify_representation(A: BAO, f: RepresentationMap) -> VerifierReport:
    T = f.target
    carr = [int(x) for x in A.carrier()]
    img = {x: f(x) for x in carr}
    atoms = A.atoms()
    unit = T.unit
    n = len(carr)

    # Boolean part: normality, join via atom decomposition, complement.
    bh = ClauseVerdict("boolean_hom", True, 2 * n)
    if img[0] != 0:
        bh = ClauseVerdict("boolean_hom", False, 1, _hex_inst(x=0), {"f(0)": img[0]})
    else:
        for x in carr:
            parts = [a for a in atoms if a & x]
            joined = 0
            for a in parts:
                joined |= img[a]
            if joined != img[x] and parts:
                a = parts[0]
                bh = ClauseVerdict("boolean_hom", False, n, _hex_inst(x=a, y=x ^ a, op="join"),
                                   {"f(x+y)": img[x], "f(x)+f(y)": img[a] | img[x ^ a]})
                break
            cx = A.complement(x)
            if img[cx] != unit & ~img[x]:
                bh = ClauseVerdict("boolean_hom", False, n, _hex_inst(x=x, op="complement"),
                                   {"f(-x)": img[cx], "-f(x)": unit & ~img[x]})
                break

    def op_clause(name, ops, lhs, rhs, label):
        checked = 0
        for arg in ops:
            for x in carr:
                checked += 1
                left, right = lhs(arg, x), rhs(arg, x)
                if left != right:
                    return ClauseVerdict(name, False, checked,
                                         {label: arg.to_list(), "x": hex(x)},
                                         {"lhs": left, "rhs": right})
        return ClauseVerdict(name, True, checked)

    sh = op_clause("subst_hom", A.taus(), lambda t, x: img[A.subst(t, x)],
                   lambda t, x: T.subst(t, img[x]), "tau")
    ch = op_clause("cyl_hom", A.gammas(), lambda g, x: img[A.cyl(g, x)],
                   lambda g, x: T.cyl(g, img[x]), "gamma")

    cover = 0
    for a in atoms:
        cover |= img[a]
    comp = ClauseVerdict("completeness", cover == unit, len(atoms),
                         None if cover == unit else {"uncovered": hex(unit & ~cover)})

    seen = {}
    inj = ClauseVerdict("injective", True, n)
    for x in carr:
        if img[x] in seen:
            inj = ClauseVerdict("injective", False, n, {"x": hex(seen[img[x]]), "y": hex(x)},
                                {"f(x)": img[x]})
            break
        seen[img[x]] = x

    clauses = {c.clause: c for c in (bh, sh, ch, comp)}
    report = VerifierReport(clauses, inj, atomic_representation(A, f))
    if not report.is_complete_representation and isinstance(A, FullSetAlgebra):
        if f.meta.get("surjective") is False:
            report.diagnosis = (f"{ARTIFACT_LABEL}: the witness point map {f.meta.get('point_map')} "
                                f"misses part of the base; the construction needs infinite dimension")
    return report


def atomic_representation(A: BAO, f: RepresentationMap) -> bool:
    """Every target point determines a principal ultrafilter ``{a : s in f(a)}``."""
    carr = [int(x) for x in A.carrier()]
    imgs = {x: f(x) for x in carr}
    for k in iter_bits(f.target_unit):
        meet = A.unit
        anym = False
        for x in carr:
            if imgs[x] >> k & 1:
                meet &= x
                anym = True
        if not anym or popcount(meet) != 1 or not imgs[meet] >> k & 1:
            return False
    return True


def identity_representation(A: FullSetAlgebra) -> RepresentationMap:
    if A.relativized:
        raise MalformedInput("the identity map targets full units only")
    return RepresentationMap(A, FullSetAlgebra(A.space), {int(x): int(x) for x in A.carrier()},
                             {"name": "identity"})


# --- brute-force oracle ----------------------------------------------------------------

ORACLE_MAX_ATOMS = 4
ORACLE_MAX_DIM = 2
ORACLE_MAX_BASE = 3


@dataclass
class OracleResult:
    found: bool
    base: int | None = None
    coloring: tuple | None = None
    representation: RepresentationMap | None = None
    searched: int = 0
    note: str = ""

    def verdict(self) -> Verdict:
        return Verdict(self.found, self.searched, label="oracle",
                       instance={"base": self.base, "coloring": list(self.coloring or ())},
                       note=self.note)

    def to_json(self):
        out = {"found": self.found, "searched": self.searched, "note": self.note}
        if self.found:
            out["base"] = self.base
            out["coloring"] = list(self.coloring)
            out["representation"] = self.representation.to_json()
        return out


def _coloring_rep(A: BAO, W: int, chi: Sequence[int]) -> RepresentationMap:
    target = FullSetAlgebra.of(A.dim, W)
    atoms = A.atoms()
    table = {}
    for x in A.carrier():
        x = int(x)
        table[x] = sum(1 << k for k, col in enumerate(chi) if atoms[col] & x)
    return RepresentationMap(A, target, table, {"coloring": list(chi)})


def oracle_complete_representability(A: BAO, max_base: int) -> OracleResult:
    """Search colorings ``chi: ^alpha W -> At A`` for ``W = 1..max_base``.

    ``f(a)`` is the set of points whose color lies below ``a``; the first
    coloring (smallest ``W``, then lexicographic) giving an injective map
    that passes every verifier clause is returned.
    """
    atoms = A.atoms()
    na = len(atoms)
    if na > ORACLE_MAX_ATOMS or A.dim > ORACLE_MAX_DIM or max_base > ORACLE_MAX_BASE:
        raise CapacityError(f"oracle bounds: <= {ORACLE_MAX_ATOMS} atoms, dimension <= {ORACLE_MAX_DIM}, "
                            f"base <= {ORACLE_MAX_BASE}")
    carr = [int(x) for x in A.carrier()]
    le = np.array([[bool(a & x) for x in carr] for a in atoms])  # atom a <= x
    xm = (le.astype(np.int64) << np.arange(na)[:, None]).sum(axis=0)  # atom indices below x
    searched = 0
    for W in range(1, max_base + 1):
        space = PointSpace(A.dim, W)
        P = space.point_count
        chi = np.indices((na,) * P).reshape(P, -1).T if P else np.zeros((1, 0), dtype=np.int64)
        searched += len(chi)
        ok = np.ones(len(chi), dtype=bool)
        # injectivity: every atom is used
        for a in range(na):
            ok &= (chi == a).any(axis=1)
        for tau in A.taus():
            st = np.array([[bool(a & A.subst(tau, x)) for x in carr] for a in atoms])
            # pair (color of s o tau, color of s) must agree on every x
            good = (le[:, None, :] == st[None, :, :]).all(axis=2)
            idx = space.subst_index(tau)
            ok &= good[chi[:, idx], chi].all(axis=1)
        onehot = np.left_shift(1, chi)
        for g in A.gammas():
            cg = np.array([[bool(a & A.cyl(g, x)) for x in carr] for a in atoms])
            meets = (np.arange(1 << na)[:, None] & xm[None, :]) != 0  # (class mask, x)
            good = (cg[:, None, :] == meets[None, :, :]).all(axis=2)  # (atom, class mask)
            axes = tuple(i + 1 for i in g.members)
            shaped = onehot.reshape((len(chi),) + space.shape)
            if axes:
                red = np.bitwise_or.reduce(shaped, axis=axes, keepdims=True)
                cls = np.broadcast_to(red, shaped.shape).reshape(len(chi), P)
            else:
                cls = onehot
            ok &= good[chi, cls].all(axis=1)
        hits = np.flatnonzero(ok)
        if len(hits):
            col = tuple(int(v) for v in chi[hits[0]])
            rep = _coloring_rep(A, W, col)
            rep.meta["base"] = W
            rep_report = verify_representation(A, rep)
            if not rep_report.is_complete_representation:
                raise AssertionError("oracle hit rejected by the verifier")
            return OracleResult(True, W, col, rep, searched)
    return OracleResult(False, searched=searched, note=f"none up to base {max_base}")
