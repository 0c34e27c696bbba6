"""Finite-support relations in dimension omega over a finite base.

An element is a pair ``(support, table)`` denoting
``{s in ^omega U : s|support in table}``.  Supports are minimized eagerly so
equality is structural.

Only identity-tailed transformations (``tau(n) = n`` outside a finite set)
are available.  This is a genuine restriction of the substitution
signature: arbitrary maps on omega are not finitely describable, and
algebras with restricted substitutions can behave differently from full
polyadic algebras.  Results here speak about that fragment only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CapacityError, DimensionError, MalformedInput, ParseError
from .laws import LawReport, POSTULATES
from .rng import SplitMix64
from .termlang import Verdict

MAX_COORDS = 64
MAX_TABLE = 1 << 22


@dataclass(frozen=True)
class CofiniteTransformation:
    """``tau(i) = mapping[i]`` on a finite set, identity elsewhere."""

    exceptional: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = {}
        for i, j in self.exceptional:
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise DimensionError("coordinates are natural numbers")
            if i in pairs and pairs[i] != j:
                raise MalformedInput(f"coordinate {i} mapped twice")
            pairs[i] = j
        object.__setattr__(self, "exceptional", tuple(sorted((i, j) for i, j in pairs.items() if i != j)))

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "CofiniteTransformation":
        return cls(tuple(mapping.items()))

    @classmethod
    def identity(cls) -> "CofiniteTransformation":
        return cls()

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.exceptional)

    def __call__(self, i: int) -> int:
        return self.mapping.get(i, i)

    def domain(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.exceptional)

    def coords(self) -> frozenset[int]:
        return frozenset(c for pair in self.exceptional for c in pair)

    def compose(self, other: "CofiniteTransformation") -> "CofiniteTransformation":
        """``(self o other)(i) = self(other(i))``."""
        return compose(self, other)

    def is_identity(self) -> bool:
        return not self.exceptional

    def to_json(self) -> dict:
        return {"map": {str(i): j for i, j in self.exceptional}, "tail": "identity"}

    @classmethod
    def from_json(cls, obj) -> "CofiniteTransformation":
        if not isinstance(obj, Mapping) or "map" not in obj:
            raise MalformedInput('transformations are {"map": {...}, "tail": "identity"}')
        if obj.get("tail", "identity") != "identity":
            raise MalformedInput("only identity tails are supported")
        try:
            return cls(tuple((int(k), int(v)) for k, v in obj["map"].items()))
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"bad transformation map: {exc}") from None


def compose(sigma: CofiniteTransformation, tau: CofiniteTransformation) -> CofiniteTransformation:
    dom = sigma.domain() | tau.domain()
    return CofiniteTransformation(tuple((i, sigma(tau(i))) for i in sorted(dom)))


def _check_coords(n: int):
    if n > MAX_COORDS:
        raise CapacityError(f"{n} coordinates exceeds the bound {MAX_COORDS}")


@dataclass(frozen=True, eq=False)
class FiniteSupportRelation:
    base: int
    support: tuple[int, ...]
    table: np.ndarray  # bool, shape (base,) * len(support), axes follow support order

    def __post_init__(self):
        if self.base < 1:
            raise MalformedInput("base must be at least 1")
        sup = tuple(int(c) for c in self.support)
        if list(sup) != sorted(set(sup)) or any(c < 0 for c in sup):
            raise MalformedInput("support must be strictly increasing naturals")
        _check_coords(len(sup))
        t = np.asarray(self.table, dtype=bool)
        if t.shape != (self.base,) * len(sup):
            raise MalformedInput(f"table shape {t.shape} does not match support {list(sup)}")
        sup, t = _normalize(sup, t)
        t = np.array(t, dtype=bool)
        t.setflags(write=False)
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "table", t)

    def __eq__(self, other):
        return (isinstance(other, FiniteSupportRelation) and self.base == other.base
                and self.support == other.support and np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.base, self.support, self.table.tobytes()))

    def __repr__(self):
        return f"FiniteSupportRelation(base={self.base}, {to_literal(self)!r})"

    def __and__(self, other):
        return lf_and(self, other)

    def __or__(self, other):
        return lf_or(self, other)

    def __invert__(self):
        return lf_not(self)

    def __le__(self, other):
        return lf_and(self, lf_not(other)).is_zero()

    def is_zero(self) -> bool:
        return not self.support and not bool(self.table)

    def is_unit(self) -> bool:
        return not self.support and bool(self.table)

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in r) for r in np.argwhere(self.table)]

    def to_json(self) -> dict:
        return {"base": self.base, "support": list(self.support), "rows": [list(r) for r in self.rows()]}

    @classmethod
    def from_json(cls, obj) -> "FiniteSupportRelation":
        base, sup = int(obj["base"]), tuple(int(c) for c in obj["support"])
        t = np.zeros((base,) * len(sup), dtype=bool)
        for r in obj["rows"]:
            t[tuple(r)] = True
        return cls(base, sup, t)


def _normalize(sup, t):
    keep = []
    for k in range(len(sup)):
        if (t.all(axis=k) == t.any(axis=k)).all():
            continue
        keep.append(k)
    if len(keep) == len(sup):
        return sup, t
    index = tuple(slice(None) if k in keep else 0 for k in range(len(sup)))
    return tuple(sup[k] for k in keep), t[index]


def zero(base: int) -> FiniteSupportRelation:
    return FiniteSupportRelation(base, (), np.array(False))


def unit(base: int) -> FiniteSupportRelation:
    return FiniteSupportRelation(base, (), np.array(True))


def rectangle(base: int, constraints: Mapping[int, Iterable[int]]) -> FiniteSupportRelation:
    """``{s : s(i) in X_i for each constrained i}``."""
    sup = tuple(sorted(int(i) for i in constraints))
    t = np.ones((base,) * len(sup), dtype=bool)
    for axis, i in enumerate(sup):
        allowed = np.zeros(base, dtype=bool)
        for v in constraints[i]:
            if not 0 <= int(v) < base:
                raise DimensionError(f"value {v} outside base {base}")
            allowed[int(v)] = True
        shape = [1] * len(sup)
        shape[axis] = base
        t = t & allowed.reshape(shape)
    return FiniteSupportRelation(base, sup, t)


def _expand(x: FiniteSupportRelation, coords: tuple[int, ...]) -> np.ndarray:
    shape = [x.base if c in x.support else 1 for c in coords]
    full = (x.base,) * len(coords)
    if x.base ** len(coords) > MAX_TABLE:
        raise CapacityError(f"table of {x.base}^{len(coords)} rows exceeds {MAX_TABLE}")
    return np.broadcast_to(x.table.reshape(shape), full)


def _aligned(x, y):
    if x.base != y.base:
        raise DimensionError(f"bases {x.base} and {y.base} differ")
    coords = tuple(sorted(set(x.support) | set(y.support)))
    _check_coords(len(coords))
    return coords, _expand(x, coords), _expand(y, coords)


def lf_and(x, y):
    coords, a, b = _aligned(x, y)
    return FiniteSupportRelation(x.base, coords, a & b)


def lf_or(x, y):
    coords, a, b = _aligned(x, y)
    return FiniteSupportRelation(x.base, coords, a | b)


def lf_not(x):
    return FiniteSupportRelation(x.base, x.support, ~x.table)


def lf_cyl(gamma: Iterable[int], x: FiniteSupportRelation) -> FiniteSupportRelation:
    gamma = set(int(g) for g in gamma)
    axes = tuple(k for k, c in enumerate(x.support) if c in gamma)
    if not axes:
        return x
    keep = tuple(c for c in x.support if c not in gamma)
    return FiniteSupportRelation(x.base, keep, x.table.any(axis=axes))


def lf_subst(tau: CofiniteTransformation, x: FiniteSupportRelation) -> FiniteSupportRelation:
    """``{s : s o tau in x}``: support moves to ``tau[support]``."""
    if not x.support:
        return x
    img = [tau(d) for d in x.support]
    res = tuple(sorted(set(img)))
    _check_coords(len(res))
    if x.base ** len(res) > MAX_TABLE:
        raise CapacityError(f"table of {x.base}^{len(res)} rows exceeds {MAX_TABLE}")
    pos = {c: k for k, c in enumerate(res)}
    grid = np.indices((x.base,) * len(res))
    t = x.table[tuple(grid[pos[c]] for c in img)]
    return FiniteSupportRelation(x.base, res, t)


def kernel_rectangle(tau: CofiniteTransformation, constraints: Mapping[int, Iterable[int]]) -> dict:
    """Constraints of ``s_tau`` of a rectangle: the target coordinate ``m`` gets
    the intersection of ``X_i`` over the kernel class ``{i : tau(i) = m}``."""
    out: dict[int, set] = {}
    for i, allowed in constraints.items():
        m = tau(int(i))
        out[m] = set(allowed) if m not in out else out[m] & set(allowed)
    return out


# --- identities -------------------------------------------------------------------

def fresh_witness_identity(x: FiniteSupportRelation, gamma: Iterable[int], fresh: Mapping[int, int]) -> Verdict:
    """``c_(fresh[G]) s_tau x == c_(G) x`` with ``tau = fresh`` on ``G``, identity elsewhere."""
    gamma = sorted(set(int(g) for g in gamma))
    fresh = {int(k): int(v) for k, v in fresh.items()}
    if sorted(fresh) != gamma:
        raise MalformedInput(f"fresh map must be defined exactly on {gamma}")
    vals = list(fresh.values())
    if len(set(vals)) != len(vals):
        raise MalformedInput("fresh map must be injective")
    clash = set(vals) & (set(x.support) | set(gamma))
    if clash:
        raise MalformedInput(f"fresh coordinates {sorted(clash)} meet the support or G")
    tau = CofiniteTransformation.of(fresh)
    lhs = lf_cyl(vals, lf_subst(tau, x))
    rhs = lf_cyl(gamma, x)
    inst = {"gamma": gamma, "fresh": {str(k): v for k, v in sorted(fresh.items())}, "x": to_literal(x)}
    if lhs != rhs:
        return Verdict(False, 1, {}, "fresh witness", inst,
                       note=f"lhs {to_literal(lhs)} != rhs {to_literal(rhs)}")
    return Verdict(True, 1, label="fresh witness", instance=inst)


def split_below(x: FiniteSupportRelation) -> FiniteSupportRelation:
    """A nonzero element strictly below a nonzero non-unit ``x``."""
    if x.is_zero() or x.is_unit():
        raise MalformedInput("only nonzero, non-unit elements are split")
    fresh = (max(x.support) + 1) if x.support else 0
    y = lf_and(x, rectangle(x.base, {fresh: [0]}))
    return y


# --- random generation and the postulate sweep ------------------------------------------

def random_relation(rng: SplitMix64, base: int, max_support: int = 4,
                    coord_range: int = 8) -> FiniteSupportRelation:
    k = rng.below(max_support + 1)
    sup = sorted(rng.sample(range(coord_range), min(k, coord_range)))
    n = base ** len(sup)
    bits = [rng.coin() for _ in range(n)]
    t = np.array(bits, dtype=bool).reshape((base,) * len(sup))
    return FiniteSupportRelation(base, tuple(sup), t)


def random_transformation(rng: SplitMix64, coord_range: int = 8, max_moved: int = 3) -> CofiniteTransformation:
    k = rng.below(max_moved + 1)
    dom = rng.sample(range(coord_range), min(k, coord_range))
    return CofiniteTransformation(tuple((i, rng.below(coord_range + 2)) for i in dom))


def random_coords(rng: SplitMix64, coord_range: int = 8, max_size: int = 3) -> frozenset[int]:
    k = rng.below(max_size + 1)
    return frozenset(rng.sample(range(coord_range), min(k, coord_range)))


def _preimage(tau: CofiniteTransformation, gamma: frozenset) -> frozenset:
    out = {i for i in gamma if i not in tau.domain()}
    out |= {i for i, j in tau.exceptional if j in gamma}
    return frozenset(out)


def lf_axiom_sweep(base: int, samples: int, seed: int = 0, max_support: int = 4,
                   coord_range: int = 8) -> list[LawReport]:
    """Postulates 1-10 on seeded random elements, coordinate sets and transformations."""
    if base > 4:
        raise CapacityError("the sweep supports bases up to 4")
    if max_support > 6:
        raise CapacityError("generated supports are limited to 6 coordinates")
    rng = SplitMix64(seed)
    reports = []

    def rel():
        return random_relation(rng, base, max_support, coord_range)

    def run(law, check):
        for k in range(samples):
            ok, inst = check()
            if not ok:
                inst["sample"] = k
                reports.append(LawReport(law, False, samples, k + 1, instance=inst,
                                         note=f"seed {seed}"))
                return
        reports.append(LawReport(law, True, samples, samples, note=f"seed {seed}"))

    def lit(x):
        return to_literal(x)

    def p1():
        x, y = rel(), rel()
        ok = ((x | y) == (y | x) and (x & y) == (y & x) and (x | ~x).is_unit() and (x & ~x).is_zero()
              and (x | (x & y)) == x and (x & (x | y)) == x and ~~x == x)
        return ok, {"x": lit(x), "y": lit(y)}

    def p2():
        g = random_coords(rng, coord_range)
        return lf_cyl(g, zero(base)).is_zero(), {"gamma": sorted(g)}

    def p3():
        x, g = rel(), random_coords(rng, coord_range)
        return x <= lf_cyl(g, x), {"x": lit(x), "gamma": sorted(g)}

    def p4():
        x, y, g = rel(), rel(), random_coords(rng, coord_range)
        ok = lf_cyl(g, x & lf_cyl(g, y)) == (lf_cyl(g, x) & lf_cyl(g, y))
        return ok, {"x": lit(x), "y": lit(y), "gamma": sorted(g)}

    def p5():
        x, g, d = rel(), random_coords(rng, coord_range), random_coords(rng, coord_range)
        ok = lf_cyl(g, lf_cyl(d, x)) == lf_cyl(g | d, x)
        return ok, {"x": lit(x), "gamma": sorted(g), "delta": sorted(d)}

    def p6():
        x, y, t = rel(), rel(), random_transformation(rng, coord_range)
        ok = (lf_subst(t, x | y) == (lf_subst(t, x) | lf_subst(t, y))
              and lf_subst(t, ~x) == ~lf_subst(t, x))
        return ok, {"x": lit(x), "y": lit(y), "tau": t.to_json()}

    def p7():
        x = rel()
        return lf_subst(CofiniteTransformation.identity(), x) == x, {"x": lit(x)}

    def p8():
        x = rel()
        s, t = random_transformation(rng, coord_range), random_transformation(rng, coord_range)
        ok = lf_subst(s, lf_subst(t, x)) == lf_subst(compose(s, t), x)
        return ok, {"x": lit(x), "sigma": s.to_json(), "tau": t.to_json()}

    def p9():
        x, g = rel(), random_coords(rng, coord_range)
        t = random_transformation(rng, coord_range)
        m = t.mapping
        for i in g:
            m[i] = rng.below(coord_range + 2)
        s = CofiniteTransformation.of(m)
        ok = lf_subst(s, lf_cyl(g, x)) == lf_subst(t, lf_cyl(g, x))
        return ok, {"x": lit(x), "gamma": sorted(g), "sigma": s.to_json(), "tau": t.to_json()}

    def p10():
        x = rel()
        for _ in range(64):
            t, g = random_transformation(rng, coord_range), random_coords(rng, coord_range)
            d = _preimage(t, g)
            if len({t(i) for i in d}) == len(d):
                break
        else:  # pragma: no cover - the identity always qualifies
            t, g, d = CofiniteTransformation.identity(), frozenset(), frozenset()
        ok = lf_cyl(g, lf_subst(t, x)) == lf_subst(t, lf_cyl(d, x))
        return ok, {"x": lit(x), "gamma": sorted(g), "delta": sorted(d), "tau": t.to_json()}

    for law, fn in zip(POSTULATES, (p1, p2, p3, p4, p5, p6, p7, p8, p9, p10)):
        run(law, fn)
    return reports


# --- literal syntax ------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<coord>s\s*\(\s*\d+\s*\)|s\d+)|(?P<set>\{[^}]*\})|(?P<num>\d+)"
                    r"|(?P<kw>in\b|true\b|false\b)|(?P<op>[&|!~()=]))")


def _tokens(text: str):
    """Tokens as ``(kind, text, byte offset)``."""
    pos = 0
    out = []
    end = len(text.encode("utf-8"))
    text = text.rstrip()

    def at(k):
        return len(text[:k].encode("utf-8"))

    while pos < len(text):
        while text[pos].isspace():
            pos += 1
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", at(pos), ["s<i>", "{", "&", "|"])
        kind = m.lastgroup
        out.append((kind, m.group(kind).replace(" ", ""), at(m.start(kind))))
        pos = m.end()
    return out, end


def parse_literal(text: str, base: int) -> FiniteSupportRelation:
    """``s0 in {0,1} & s1 in {2}``; also ``s(0)=0``, ``|``, ``!``, parentheses,
    ``true`` and ``false``.  ``&`` binds tighter than ``|``."""
    toks, end = _tokens(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else ("end", "", end)

    def take(kind=None, value=None, expected=()):
        nonlocal pos
        tok = peek()
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"unexpected {tok[1]!r}" if tok[0] != "end" else "unexpected end of input",
                             tok[2], list(expected) or [value or kind])
        pos += 1
        return tok

    def disj():
        x = conj()
        while peek()[1] == "|":
            take()
            x = x | conj()
        return x

    def conj():
        x = unary()
        while peek()[1] == "&":
            take()
            x = x & unary()
        return x

    def unary():
        tok = peek()
        if tok[1] in ("!", "~"):
            take()
            return ~unary()
        if tok[1] == "(":
            take()
            x = disj()
            take("op", ")", [")"])
            return x
        if tok[1] == "true":
            take()
            return unit(base)
        if tok[1] == "false":
            take()
            return zero(base)
        if tok[0] == "coord":
            take()
            i = int(re.sub(r"\D", "", tok[1]))
            nxt = peek()
            if nxt[1] == "in":
                take()
                st = take("set", expected=["{"])
                body = st[1][1:-1].strip()
                try:
                    vals = [int(v) for v in body.split(",")] if body else []
                except ValueError:
                    raise ParseError("set members must be naturals", st[2], ["<digit>"]) from None
            elif nxt[1] == "=":
                take()
                vals = [int(take("num", expected=["<digit>"])[1])]
            else:
                raise ParseError("expected 'in' or '='", nxt[2], ["in", "="])
            for v in vals:
                if v >= base:
                    raise ParseError(f"value {v} outside base {base}", tok[2], [f"< {base}"])
            return rectangle(base, {i: vals})
        raise ParseError("expected a constraint", tok[2], ["s<i>", "(", "!", "true", "false"])

    if not toks:
        raise ParseError("empty literal", 0, ["s<i>"])
    x = disj()
    if pos != len(toks):
        raise ParseError(f"unexpected {peek()[1]!r}", peek()[2], ["&", "|", "end of input"])
    return x


def to_literal(x: FiniteSupportRelation) -> str:
    """A literal denoting ``x``: rectangles print as conjunctions, other tables as a disjunction of rows."""
    if x.is_zero():
        return "false"
    if x.is_unit():
        return "true"
    proj = [np.flatnonzero(x.table.any(axis=tuple(j for j in range(len(x.support)) if j != k)))
            for k in range(len(x.support))]
    box = rectangle(x.base, {c: [int(v) for v in p] for c, p in zip(x.support, proj)})
    if box == x:
        return " & ".join(f"s{c} in {{{','.join(str(int(v)) for v in p)}}}" for c, p in zip(x.support, proj))
    rows = [" & ".join(f"s{c}={v}" for c, v in zip(x.support, r)) for r in x.rows()]
    return " | ".join(f"({r})" for r in rows)


def parse_coords(text: str) -> frozenset[int]:
    body = text.strip().strip("{}[]").strip()
    try:
        return frozenset(int(v) for v in body.split(",")) if body else frozenset()
    except ValueError:
        raise MalformedInput(f"not a coordinate set: {text!r}") from None


__all__ = [
    "CofiniteTransformation", "FiniteSupportRelation", "compose", "zero", "unit", "rectangle",
    "lf_and", "lf_or", "lf_not", "lf_cyl", "lf_subst", "kernel_rectangle", "fresh_witness_identity",
    "split_below", "random_relation", "random_transformation", "lf_axiom_sweep", "parse_literal",
    "to_literal", "parse_coords",
]
