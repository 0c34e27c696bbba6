"""Terms and equations over the polyadic signature.

Grammar (``-`` binds tightest, then ``.``, then ``+``; both binary
operators associate to the left)::

    term := '0' | '1' | ident | '-' term | term '+' term | term '.' term
          | 'c{' [nat (',' nat)*] '}' '(' term ')'
          | 's[' nat ':' nat (',' nat ':' nat)* ']' '(' term ')'
          | '(' term ')'

A substitution literal maps the listed coordinates and fixes every other
one, so ``s[0:1,1:0]`` is the swap ``[1, 0]`` in dimension 2.  ``c{}`` is
accepted and denotes the identity.  Subst nodes store the *normalized*
mapping (sorted, fixed points dropped) so that printing and parsing are
mutually inverse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .algebra import BAO, MAX_TABLE_BITS, Operator
from .core import DimensionSet, Transformation
from .errors import CapacityError, DimensionError, ParseError, UnboundVariable
from .rng import SplitMix64


class Term:
    __slots__ = ()

    def __add__(self, other):
        return Or(self, other)

    def __mul__(self, other):
        return And(self, other)

    def __neg__(self):
        return Not(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class One(Term):
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Not(Term):
    arg: Term


@dataclass(frozen=True)
class Or(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class And(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Cyl(Term):
    gamma: tuple[int, ...]
    arg: Term

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(sorted(set(int(g) for g in self.gamma))))


@dataclass(frozen=True)
class Subst(Term):
    """``pairs`` lists ``(i, tau(i))`` for the coordinates ``tau`` moves."""

    pairs: tuple[tuple[int, int], ...]
    arg: Term

    def __post_init__(self):
        norm = tuple(sorted((int(i), int(j)) for i, j in self.pairs if int(i) != int(j)))
        if len({i for i, _ in norm}) != len(norm):
            raise ValueError(f"conflicting substitution pairs {self.pairs}")
        object.__setattr__(self, "pairs", norm)

    @classmethod
    def of(cls, tau, arg: Term) -> "Subst":
        return cls(tuple(enumerate(tau)), arg)

    def transformation(self, dim: int) -> Transformation:
        return Transformation.from_pairs(dim, self.pairs)


def cyl(gamma, arg: Term) -> Cyl:
    members = gamma.members if isinstance(gamma, DimensionSet) else gamma
    return Cyl(tuple(members), arg)


def subst(tau, arg: Term) -> Subst:
    entries = tau.entries if isinstance(tau, Transformation) else tau
    return Subst.of(entries, arg)


# --- printing ------------------------------------------------------------------

_PREC = {Or: 1, And: 2}


def to_text(t: Term) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Not):
        inner = to_text(t.arg)
        return "-" + (f"({inner})" if isinstance(t.arg, (Or, And)) else inner)
    if isinstance(t, (Or, And)):
        p = _PREC[type(t)]
        sym = " + " if isinstance(t, Or) else " . "
        left = to_text(t.left)
        if isinstance(t.left, (Or, And)) and _PREC[type(t.left)] < p:
            left = f"({left})"
        right = to_text(t.right)
        if isinstance(t.right, (Or, And)) and _PREC[type(t.right)] <= p:
            right = f"({right})"
        return left + sym + right
    if isinstance(t, Cyl):
        return "c{" + ",".join(map(str, t.gamma)) + "}(" + to_text(t.arg) + ")"
    if isinstance(t, Subst):
        pairs = t.pairs or ((0, 0),)
        return "s[" + ",".join(f"{i}:{j}" for i, j in pairs) + "](" + to_text(t.arg) + ")"
    raise TypeError(f"not a term: {t!r}")


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, (Zero, One)):
        return frozenset()
    if isinstance(t, (Or, And)):
        return free_vars(t.left) | free_vars(t.right)
    return free_vars(t.arg)


# --- parsing -------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<cyl>c\{)|(?P<sub>s\[)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<nat>\d+)|(?P<sym>[-+.(){}\[\],:=]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    raw = text.encode("utf-8")
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", len(text[:pos].encode("utf-8")))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), len(text[:start].encode("utf-8"))))
        pos = m.end()
    toks.append(_Tok("eof", "", len(raw)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected):
        t = self.tok
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {what}", t.offset, expected)

    def eat(self, text):
        if self.tok.text == text and self.tok.kind in ("sym",):
            self.i += 1
            return
        self.fail([repr(text)])

    def nat(self) -> int:
        if self.tok.kind != "nat":
            self.fail(["natural number"])
        v = int(self.tok.text)
        self.i += 1
        return v

    def term(self) -> Term:
        left = self.product()
        while self.tok.kind == "sym" and self.tok.text == "+":
            self.i += 1
            left = Or(left, self.product())
        return left

    def product(self) -> Term:
        left = self.unary()
        while self.tok.kind == "sym" and self.tok.text == ".":
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Term:
        if self.tok.kind == "sym" and self.tok.text == "-":
            self.i += 1
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "nat":
            if t.text in ("0", "1"):
                self.i += 1
                return Zero() if t.text == "0" else One()
            self.fail(["'0'", "'1'"])
        if t.kind == "id":
            self.i += 1
            return Var(t.text)
        if t.kind == "cyl":
            self.i += 1
            members = []
            if not (self.tok.kind == "sym" and self.tok.text == "}"):
                members.append(self.nat())
                while self.tok.kind == "sym" and self.tok.text == ",":
                    self.i += 1
                    members.append(self.nat())
            self.eat("}")
            return Cyl(tuple(members), self.parenthesized())
        if t.kind == "sub":
            self.i += 1
            pairs = [self.pair()]
            while self.tok.kind == "sym" and self.tok.text == ",":
                self.i += 1
                pairs.append(self.pair())
            self.eat("]")
            if len({i for i, _ in pairs}) != len(pairs):
                raise ParseError("coordinate listed twice in substitution", t.offset)
            return Subst(tuple(pairs), self.parenthesized())
        if t.kind == "sym" and t.text == "(":
            return self.parenthesized()
        self.fail(["'0'", "'1'", "identifier", "'-'", "'c{'", "'s['", "'('"])

    def pair(self):
        i = self.nat()
        self.eat(":")
        return i, self.nat()

    def parenthesized(self) -> Term:
        self.eat("(")
        inner = self.term()
        self.eat(")")
        return inner


def parse(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "eof":
        p.fail(["'+'", "'.'", "end of input"])
    return t


# --- equations -----------------------------------------------------------------

@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term
    label: str = ""
    instance: Mapping = field(default_factory=dict, compare=False, hash=False)

    def free_vars(self) -> list[str]:
        return sorted(free_vars(self.lhs) | free_vars(self.rhs))

    def to_text(self) -> str:
        return f"{to_text(self.lhs)} = {to_text(self.rhs)}"

    def __str__(self):
        return self.to_text()


def parse_equation(text: str, label: str = "") -> Equation:
    p = _Parser(text)
    lhs = p.term()
    p.eat("=")
    rhs = p.term()
    if p.tok.kind != "eof":
        p.fail(["'+'", "'.'", "end of input"])
    return Equation(lhs, rhs, label)


def parse_equation_file(text: str) -> list[Equation]:
    """One ``lhs = rhs`` per line; ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if body:
            out.append(parse_equation(body, label=f"line {lineno}"))
    return out


# --- evaluation ----------------------------------------------------------------

def _dims_ok(A: BAO, t: Term):
    if isinstance(t, Cyl):
        bad = [g for g in t.gamma if g >= A.dim]
        if bad:
            raise DimensionError(f"c{{{','.join(map(str, t.gamma))}}} used in dimension {A.dim}")
    if isinstance(t, Subst):
        bad = [p for p in t.pairs if max(p) >= A.dim]
        if bad:
            raise DimensionError(f"substitution pairs {bad} used in dimension {A.dim}")


def evaluate(A: BAO, t: Term, env: Mapping):
    """Evaluate ``t`` in ``A``.

    Variables may be bound to ``int`` masks (scalar evaluation through the
    algebra's operators) or to integer numpy arrays, in which case the whole
    array of environments is evaluated at once through the operator tables.
    """
    vectorized = any(isinstance(v, np.ndarray) for v in env.values())
    if vectorized:
        env = {k: np.asarray(v, dtype=np.int64) for k, v in env.items()}
    unit = np.int64(A.unit) if vectorized else A.unit
    cache: dict[Term, object] = {}

    def ev(t):
        hit = cache.get(t)
        if hit is not None:
            return hit
        if isinstance(t, Zero):
            r = unit * 0
        elif isinstance(t, One):
            r = unit
        elif isinstance(t, Var):
            if t.name not in env:
                raise UnboundVariable(t.name)
            r = env[t.name]
        elif isinstance(t, Not):
            r = unit & ~ev(t.arg)
        elif isinstance(t, Or):
            r = ev(t.left) | ev(t.right)
        elif isinstance(t, And):
            r = ev(t.left) & ev(t.right)
        else:
            _dims_ok(A, t)
            if isinstance(t, Cyl):
                op = Operator.cyl(t.gamma, A.dim)
            else:
                op = Operator.subst(t.transformation(A.dim), A.dim)
            x = ev(t.arg)
            r = A.table(op)[x] if vectorized else A.apply(op, int(x))
        cache[t] = r
        return r

    return ev(t)


@dataclass
class Verdict:
    passed: bool
    checked: int = 0
    witness: dict | None = None
    label: str = ""
    instance: dict = field(default_factory=dict)
    equation: str = ""
    values: dict | None = None  # lhs/rhs at the witness
    note: str = ""

    def to_json(self) -> dict:
        out = {"label": self.label, "passed": self.passed, "checked": self.checked}
        if self.equation:
            out["equation"] = self.equation
        if self.instance:
            out["instance"] = self.instance
        if self.witness is not None:
            out["witness"] = {k: (hex(v) if isinstance(v, int) else v) for k, v in self.witness.items()}
        if self.values is not None:
            out["values"] = {k: hex(v) for k, v in self.values.items()}
        if self.note:
            out["note"] = self.note
        return out


EXHAUSTIVE_MAX_CARRIER = 1 << 10
EXHAUSTIVE_MAX_VARS = 2


def sample_element(A: BAO, rng: SplitMix64) -> int:
    if A.nbits <= MAX_TABLE_BITS:
        carr = A.carrier()
        return int(carr[rng.below(len(carr))])
    m, width = 0, 0
    while width < A.nbits:
        m |= rng.next_u64() << width
        width += 64
    return m & A.unit


def environments(A: BAO, names, mode: str = "exhaustive", seed: int = 0, count: int = 1000):
    """Deterministic environment sweep as ``{name: int64 array}``.

    Exhaustive order is lexicographic in the (sorted) variable names with the
    first name varying slowest.
    """
    names = list(names)
    if mode == "exhaustive":
        if A.carrier_size > EXHAUSTIVE_MAX_CARRIER:
            raise CapacityError(f"exhaustive sweep needs a carrier of at most {EXHAUSTIVE_MAX_CARRIER} elements")
        if len(names) > EXHAUSTIVE_MAX_VARS:
            raise CapacityError(f"exhaustive sweep supports at most {EXHAUSTIVE_MAX_VARS} variables")
        carr = A.carrier()
        if not names:
            return {}, 1
        grids = np.meshgrid(*([carr] * len(names)), indexing="ij")
        return {n: g.ravel() for n, g in zip(names, grids)}, len(carr) ** len(names)
    if mode == "sampled":
        rng = SplitMix64(seed)
        cols = {n: [] for n in names}
        for _ in range(count):
            for n in names:
                cols[n].append(sample_element(A, rng))
        if A.nbits <= MAX_TABLE_BITS:
            return {n: np.array(v, dtype=np.int64) for n, v in cols.items()}, count
        return cols, count
    raise ValueError(f"unknown mode {mode!r}")


def check_equation(A: BAO, eq: Equation, mode: str = "exhaustive",
                   seed: int = 0, count: int = 1000) -> Verdict:
    """Sweep ``eq`` over environments; report the first counterexample."""
    names = eq.free_vars()
    env, n = environments(A, names, mode, seed, count)
    base = Verdict(True, 0, label=eq.label, instance=dict(eq.instance), equation=eq.to_text())
    if not names:
        lhs, rhs = evaluate(A, eq.lhs, {}), evaluate(A, eq.rhs, {})
        base.checked = 1
        if lhs != rhs:
            base.passed, base.witness = False, {}
            base.values = {"lhs": int(lhs), "rhs": int(rhs)}
        return base
    if isinstance(next(iter(env.values())), list):  # large algebra, scalar path
        for k in range(n):
            point = {nm: env[nm][k] for nm in names}
            lhs, rhs = evaluate(A, eq.lhs, point), evaluate(A, eq.rhs, point)
            if lhs != rhs:
                base.passed, base.checked, base.witness = False, k + 1, point
                base.values = {"lhs": lhs, "rhs": rhs}
                return base
        base.checked = n
        return base
    lhs = np.broadcast_to(evaluate(A, eq.lhs, env), (n,))
    rhs = np.broadcast_to(evaluate(A, eq.rhs, env), (n,))
    bad = np.flatnonzero(lhs != rhs)
    if len(bad):
        k = int(bad[0])
        base.passed, base.checked = False, k + 1
        base.witness = {nm: int(env[nm][k]) for nm in names}
        base.values = {"lhs": int(lhs[k]), "rhs": int(rhs[k])}
    else:
        base.checked = n
    return base
