"""Finite algebra engines.

Two concrete carriers share one interface (:class:`BAO`):

``FullSetAlgebra``
    the powerset of ``^alpha U`` (optionally relativized to a unit), with the
    set-theoretic cylindrifications and substitutions;
``FiniteBAO``
    an abstract powerset of ``n`` atoms whose operators are raw lookup tables,
    so that algebras violating the polyadic postulates can be written down.

Elements are ``int`` bitmasks.  Operator tables are ``int64`` numpy arrays
indexed by mask, and exist whenever the mask width is at most
``MAX_TABLE_BITS``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    DimensionSet,
    PointSpace,
    Transformation,
    as_dimset,
    as_transformation,
    iter_bits,
    popcount,
)
from .errors import CapacityError, DimensionError, MalformedInput, UnsupportedOperation

MAX_TABLE_BITS = 16
MAX_SUBALGEBRA_ATOMS = 16


@dataclass(frozen=True)
class Operator:
    """Identifier of a non-Boolean operator: ``c{...}`` or ``s[...]``."""

    kind: str  # "c" or "s"
    arg: DimensionSet | Transformation

    @property
    def dim(self) -> int:
        return self.arg.dim

    def key(self) -> str:
        if self.kind == "c":
            return "c" + self.arg.key()
        return "s[" + ",".join(map(str, self.arg.entries)) + "]"

    def __str__(self):
        return self.key()

    @classmethod
    def cyl(cls, gamma, dim: int) -> "Operator":
        return cls("c", as_dimset(gamma, dim))

    @classmethod
    def subst(cls, tau, dim: int | None = None) -> "Operator":
        return cls("s", as_transformation(tau, dim))


_OP_RE = re.compile(r"^\s*(?:c\s*\{([\d,\s]*)\}|s\s*\[([\d,\s]*)\]|(identity|id))\s*$")


def parse_operator(text, dim: int) -> Operator:
    """Parse ``"c{0,1}"``, ``"s[1,0]"`` or ``"identity"`` (meaning ``s_Id``)."""
    if isinstance(text, Operator):
        return text
    m = _OP_RE.match(str(text))
    if not m:
        raise MalformedInput(f"unknown operator id {text!r}")
    if m.group(3):
        return Operator.subst(Transformation.identity(dim), dim)
    if m.group(1) is not None:
        items = [int(t) for t in m.group(1).split(",") if t.strip()]
        return Operator.cyl(items, dim)
    items = [int(t) for t in m.group(2).split(",") if t.strip()]
    return Operator.subst(items, dim)


class BAO:
    """Common surface of the finite algebra engines.

    Subclasses provide ``dim``, ``nbits``, ``unit`` and the two table
    builders; everything else is derived.
    """

    dim: int
    nbits: int
    unit: int

    def __init__(self):
        self._tables: dict[Operator, np.ndarray] = {}

    # -- Boolean part ------------------------------------------------------
    def join(self, x: int, y: int) -> int:
        return x | y

    def meet(self, x: int, y: int) -> int:
        return x & y

    def complement(self, x: int) -> int:
        return self.unit & ~x

    def contains(self, x: int) -> bool:
        return 0 <= x and not (x & ~self.unit)

    def atoms(self) -> list[int]:
        return [1 << k for k in iter_bits(self.unit)]

    def atoms_below(self, x: int) -> list[int]:
        return [1 << k for k in iter_bits(x & self.unit)]

    def carrier(self) -> np.ndarray:
        """Every element, sorted by mask."""
        self._require_tables()
        allm = np.arange(1 << self.nbits, dtype=np.int64)
        if self.unit == (1 << self.nbits) - 1:
            return allm
        return allm[(allm & ~np.int64(self.unit)) == 0]

    @property
    def carrier_size(self) -> int:
        return 1 << popcount(self.unit)

    # -- signature -----------------------------------------------------------
    def gammas(self) -> list[DimensionSet]:
        return list(DimensionSet.all(self.dim))

    def taus(self) -> list[Transformation]:
        return list(Transformation.all(self.dim))

    def operators(self) -> list[Operator]:
        return [Operator("c", g) for g in self.gammas()] + [Operator("s", t) for t in self.taus()]

    # -- operators -----------------------------------------------------------
    def cyl(self, gamma, x: int) -> int:
        return self.apply(Operator.cyl(gamma, self.dim), x)

    def subst(self, tau, x: int) -> int:
        return self.apply(Operator.subst(tau, self.dim), x)

    def apply(self, op: Operator, x: int) -> int:
        self._check_op(op)
        if self.nbits <= MAX_TABLE_BITS:
            return int(self.table(op)[x])
        return self._apply_direct(op, x)

    def table(self, op) -> np.ndarray:
        op = parse_operator(op, self.dim)
        self._check_op(op)
        self._require_tables()
        t = self._tables.get(op)
        if t is None:
            t = self._build_table(op)
            t.setflags(write=False)
            self._tables[op] = t
        return t

    def cyl_table(self, gamma) -> np.ndarray:
        return self.table(Operator.cyl(gamma, self.dim))

    def subst_table(self, tau) -> np.ndarray:
        return self.table(Operator.subst(tau, self.dim))

    def _check_op(self, op: Operator):
        if op.dim != self.dim:
            raise DimensionError(f"operator {op} has dimension {op.dim}, algebra has {self.dim}")

    def _require_tables(self):
        if self.nbits > MAX_TABLE_BITS:
            raise CapacityError(
                f"carrier of 2^{self.nbits} elements exceeds the table bound 2^{MAX_TABLE_BITS}"
            )

    def _apply_direct(self, op: Operator, x: int) -> int:  # pragma: no cover - overridden
        raise CapacityError("operator tables unavailable for this algebra")

    def _build_table(self, op: Operator) -> np.ndarray:  # pragma: no cover - overridden
        raise NotImplementedError


def _all_mask_bits(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[1]
    if n == 0:
        return np.zeros(bits.shape[0], dtype=np.int64)
    return bits.astype(np.int64) @ (np.int64(1) << np.arange(n, dtype=np.int64))


class FullSetAlgebra(BAO):
    """``<P(^alpha U), c_(Gamma), s_tau>``, optionally relativized to ``unit``.

    On a relativized unit every result is intersected with the unit.
    """

    def __init__(self, space: PointSpace, unit: int | None = None):
        super().__init__()
        self.space = space
        self.dim = space.dim
        self.nbits = space.point_count
        full = space.full_mask
        self.unit = full if unit is None else int(unit)
        if self.unit & ~full or self.unit < 0:
            raise MalformedInput(f"unit {self.unit:#x} is not a set of points of ^{space.dim}{space.base}")

    @classmethod
    def of(cls, dim: int, base: int, unit: int | None = None) -> "FullSetAlgebra":
        return cls(PointSpace(dim, base), unit)

    @property
    def base(self) -> int:
        return self.space.base

    @property
    def relativized(self) -> bool:
        return self.unit != self.space.full_mask

    def __repr__(self):
        rel = f", unit={self.unit:#x}" if self.relativized else ""
        return f"FullSetAlgebra(dim={self.dim}, base={self.base}{rel})"

    def __eq__(self, other):
        return (isinstance(other, FullSetAlgebra) and self.space == other.space
                and self.unit == other.unit)

    def __hash__(self):
        return hash((self.space, self.unit))

    def _apply_direct(self, op: Operator, x: int) -> int:
        from .core import bits_of, mask_of

        bits = bits_of(x, self.nbits)
        ubits = bits_of(self.unit, self.nbits)
        if op.kind == "c":
            axes = tuple(op.arg.members)
            if not axes:
                return x & self.unit
            arr = bits.reshape(self.space.shape).any(axis=axes, keepdims=True)
            out = np.broadcast_to(arr, self.space.shape).ravel()
        else:
            out = bits[self.space.subst_index(op.arg)]
        return mask_of(out & ubits)

    def _build_table(self, op: Operator) -> np.ndarray:
        n = self.nbits
        allbits = _all_mask_bits(n)
        if op.kind == "c":
            axes = tuple(g + 1 for g in op.arg.members)
            if axes:
                shaped = allbits.reshape((-1,) + self.space.shape)
                red = shaped.any(axis=axes, keepdims=True)
                out = np.broadcast_to(red, shaped.shape).reshape(-1, n)
            else:
                out = allbits
        else:
            out = allbits[:, self.space.subst_index(op.arg)]
        return _pack_rows(out) & np.int64(self.unit)


class FiniteBAO(BAO):
    """A powerset of ``atom_count`` atoms with table-backed operators.

    ``mode`` records whether the tables were supplied in full (``"tables"``)
    or only on atoms and extended additively (``"atoms"``).
    """

    def __init__(self, dim: int, atom_count: int,
                 cyl_tables: Mapping, subst_tables: Mapping,
                 mode: str = "tables", meta: Mapping | None = None):
        super().__init__()
        if atom_count > MAX_TABLE_BITS:
            raise CapacityError(f"{atom_count} atoms exceeds the bound {MAX_TABLE_BITS}")
        self.dim = dim
        self.nbits = self.atom_count = atom_count
        self.unit = (1 << atom_count) - 1
        self.mode = mode
        self.meta = dict(meta or {})
        size = 1 << atom_count
        ident = np.arange(size, dtype=np.int64)
        for op_kind, given in (("c", cyl_tables), ("s", subst_tables)):
            for key, tab in given.items():
                op = Operator(op_kind, as_dimset(key, dim) if op_kind == "c" else as_transformation(key, dim))
                arr = np.array(tab, dtype=np.int64)
                if arr.shape != (size,):
                    raise MalformedInput(f"table for {op} has shape {arr.shape}, expected ({size},)")
                if ((arr < 0) | (arr > self.unit)).any():
                    raise MalformedInput(f"table for {op} has entries outside the carrier")
                arr.setflags(write=False)
                self._tables[op] = arr
        for op in self.operators():
            if op not in self._tables:
                if (op.kind == "c" and not op.arg.members) or (op.kind == "s" and op.arg.is_identity()):
                    self._tables[op] = ident
                else:
                    raise MalformedInput(f"missing table for operator {op}")

    @classmethod
    def from_atom_images(cls, dim: int, atom_count: int, cyl_images: Mapping,
                         subst_images: Mapping, meta=None) -> "FiniteBAO":
        """Build the completely additive extension ``f(x) = sum{f(a) : a <= x}``."""

        def extend(images):
            images = list(images)
            if len(images) != atom_count:
                raise MalformedInput(f"expected {atom_count} atom images, got {len(images)}")
            return additive_extension(images, atom_count)

        return cls(dim, atom_count,
                   {k: extend(v) for k, v in cyl_images.items()},
                   {k: extend(v) for k, v in subst_images.items()},
                   mode="atoms", meta=meta)

    def with_table(self, op, table) -> "FiniteBAO":
        """Copy with one operator table replaced (used to build mutants)."""
        op = parse_operator(op, self.dim)
        cyl = {o.arg: t for o, t in self._tables.items() if o.kind == "c"}
        sub = {o.arg: t for o, t in self._tables.items() if o.kind == "s"}
        (cyl if op.kind == "c" else sub)[op.arg] = table
        return FiniteBAO(self.dim, self.atom_count, cyl, sub, mode="tables", meta=self.meta)

    def _build_table(self, op):  # every table exists from construction
        return self._tables[op]

    def __repr__(self):
        return f"FiniteBAO(dim={self.dim}, atoms={self.atom_count}, mode={self.mode!r})"

    def __eq__(self, other):
        if not isinstance(other, FiniteBAO) or (self.dim, self.atom_count) != (other.dim, other.atom_count):
            return False
        return all(np.array_equal(self.table(op), other.table(op)) for op in self.operators())

    __hash__ = None


def additive_extension(images: Sequence[int], n: int) -> np.ndarray:
    """``ext[x] = OR of images[k] over bits k of x``, for every mask ``x < 2^n``."""
    ext = np.zeros(1 << n, dtype=np.int64)
    masks = np.arange(1 << n, dtype=np.int64)
    for k in range(n):
        has = ((masks >> k) & 1).astype(bool)
        ext[has] |= np.int64(images[k])
    return ext


def to_bao(A: BAO) -> FiniteBAO:
    """Re-express any engine as a table-backed ``FiniteBAO`` over its atoms."""
    if isinstance(A, FiniteBAO):
        return A
    elements = _unions_of_blocks(A.atoms())
    return subalgebra_bao(A, elements, _blocks=A.atoms())


# --- subalgebras -------------------------------------------------------------

def _refine(blocks: list[int], x: int) -> tuple[list[int], bool]:
    out, changed = [], False
    for b in blocks:
        inside, outside = b & x, b & ~x
        if inside and outside:
            out += [inside, outside]
            changed = True
        else:
            out.append(b)
    return out, changed


def _unions_of_blocks(blocks: Sequence[int]) -> list[int]:
    if len(blocks) > MAX_SUBALGEBRA_ATOMS:
        raise CapacityError(
            f"subalgebra with {len(blocks)} atoms has more than 2^{MAX_SUBALGEBRA_ATOMS} elements"
        )
    elems = [0]
    for b in blocks:
        elems += [e | b for e in elems]
    return sorted(elems)


def generated_subalgebra(A: BAO, generators: Iterable[int]) -> list[int]:
    """Least subuniverse containing ``generators``; elements sorted by mask.

    The Boolean part is tracked as a partition of the unit.  For set algebras
    the operators are additive, so images of the blocks suffice; for table
    algebras every element of the current candidate is pushed through every
    operator.
    """
    gens = [int(g) for g in generators]
    for g in gens:
        if not A.contains(g):
            raise MalformedInput(f"generator {g:#x} is not below the unit")
    blocks = [A.unit] if A.unit else []
    for g in gens:
        blocks, _ = _refine(blocks, g)
    ops = A.operators()
    additive = isinstance(A, FullSetAlgebra)
    while True:
        if len(blocks) > MAX_SUBALGEBRA_ATOMS:
            raise CapacityError(f"closure exceeds 2^{MAX_SUBALGEBRA_ATOMS} elements")
        sources = blocks if additive else _unions_of_blocks(blocks)
        changed = False
        for op in ops:
            for x in sources:
                blocks, c = _refine(blocks, A.apply(op, x))
                changed |= c
        if not changed:
            return _unions_of_blocks(blocks)


def _embedding(blocks: Sequence[int]) -> list[int]:
    """``out[m]`` is the union of ``blocks[k]`` over the bits ``k`` of ``m``."""
    k = len(blocks)
    if k > MAX_TABLE_BITS:
        raise CapacityError(f"{k} atoms exceeds the bound {MAX_TABLE_BITS}")
    out = [0] * (1 << k)
    for m in range(1, 1 << k):
        low = (m & -m).bit_length() - 1
        out[m] = out[m & (m - 1)] | blocks[low]
    return out


def subalgebra_atoms(elements: Sequence[int]) -> list[int]:
    """Minimal nonzero members of a finite Boolean subalgebra, sorted by mask."""
    nonzero = sorted({e for e in elements if e})
    return [e for e in nonzero if not any(f != e and (f & e) == f for f in nonzero)]


def subalgebra_bao(A: BAO, elements: Sequence[int], meta=None, _blocks=None) -> FiniteBAO:
    """Package a subuniverse of ``A`` as a ``FiniteBAO`` over its own atoms.

    Atom ``k`` of the result corresponds to the ``k``-th smallest atom of the
    subalgebra; ``meta["embedding"][m]`` is the element of ``A`` encoded by
    mask ``m``.
    """
    blocks = list(_blocks) if _blocks is not None else subalgebra_atoms(elements)
    embedding = _embedding(blocks)
    index = {e: m for m, e in enumerate(embedding)}
    if len(index) != len(embedding) or set(index) != set(int(e) for e in elements):
        raise MalformedInput("elements do not form a Boolean subalgebra")
    emb = np.array(embedding, dtype=np.int64)
    cyl, sub = {}, {}
    for op in A.operators():
        image = A.table(op)[emb] if A.nbits <= MAX_TABLE_BITS else [A.apply(op, int(e)) for e in emb]
        try:
            tab = [index[int(v)] for v in image]
        except KeyError as exc:
            raise MalformedInput(f"subalgebra is not closed under {op}: image {int(exc.args[0]):#x}") from None
        (cyl if op.kind == "c" else sub)[op.arg] = tab
    info = {"embedding": embedding}
    info.update(meta or {})
    return FiniteBAO(A.dim, len(blocks), cyl, sub, mode="tables", meta=info)


def neat_reduct(A: BAO, J) -> FiniteBAO:
    """The ``J`` compression of ``A``: elements fixed by ``c_(dim - J)``.

    ``J`` is re-indexed order-isomorphically onto ``{0, ..., |J|-1}``;
    substitutions ``tau`` of the reduct act as ``tau`` on ``J`` and as the
    identity elsewhere.  ``meta["J"]`` keeps the original coordinates.
    """
    J = as_dimset(J, A.dim)
    jlist = sorted(J.members)
    rest = J.complement()
    ctab = A.cyl_table(rest)
    carr = A.carrier()
    fixed = carr[ctab[carr] == carr]
    blocks = subalgebra_atoms([int(x) for x in fixed])
    if len(fixed) != 1 << len(blocks) or (sum(blocks) != A.unit and A.unit):
        raise MalformedInput("fixed points of the cylindrification do not form a Boolean subalgebra")
    k = len(blocks)
    embedding = _embedding(blocks)
    index = {e: m for m, e in enumerate(embedding)}
    d = len(jlist)
    cyl, sub = {}, {}
    for g in DimensionSet.all(d):
        op = Operator.cyl([jlist[i] for i in g.members], A.dim)
        cyl[g] = [index[int(A.apply(op, e))] for e in embedding]
    for t in Transformation.all(d):
        entries = list(range(A.dim))
        for i, ji in enumerate(jlist):
            entries[ji] = jlist[t(i)]
        op = Operator.subst(entries, A.dim)
        try:
            sub[t] = [index[int(A.apply(op, e))] for e in embedding]
        except KeyError:
            raise MalformedInput(f"substitution {op} leaves the neat reduct") from None
    return FiniteBAO(d, k, cyl, sub, mode="tables",
                     meta={"J": jlist, "embedding": embedding})


# --- partition algebras --------------------------------------------------------

@dataclass
class PartitionAlgebra:
    algebra: FullSetAlgebra
    blocks: list[int]  # block masks, block 0 is the diagonal
    generators: list[int]  # R_X for X subset of J, in order of the bitmask of X
    subalgebra: list[int] = field(default_factory=list)

    def r(self, X: Iterable[int], principal: int) -> int:
        return _r_of(self.blocks, set(X), principal)


def _r_of(blocks, X, principal):
    m = 0
    for k in X:
        m |= blocks[k]
    if principal in X:
        m |= blocks[0]
    return m


def partition_algebra(u: int, blocks: Sequence[Iterable[Sequence[int]]],
                      principal_index: int) -> PartitionAlgebra:
    """Finite analogue of the two-dimensional partition construction.

    ``blocks`` partitions ``U x U``; block 0 is the diagonal and the others
    are symmetric with full domain and range.  The ultrafilter on the
    non-diagonal indices is the principal one generated by
    ``principal_index``, so ``R_X`` absorbs the diagonal iff the principal
    index is in ``X``.
    """
    space = PointSpace(2, u)
    problems = []
    masks = []
    seen = 0
    for k, blk in enumerate(blocks):
        pairs = {tuple(int(v) for v in p) for p in blk}
        bad = [p for p in pairs if len(p) != 2 or not all(0 <= v < u for v in p)]
        if bad:
            raise MalformedInput(f"block {k} has pairs outside U x U: {sorted(bad)[:3]}")
        m = space.mask_of_points(pairs)
        if m & seen:
            problems.append(f"block {k} overlaps an earlier block")
        seen |= m
        masks.append(m)
        if k == 0:
            if pairs != {(x, x) for x in range(u)}:
                problems.append("block 0 is not the diagonal")
            continue
        if not pairs:
            problems.append(f"block {k} is empty")
        if any((b, a) not in pairs for a, b in pairs):
            problems.append(f"block {k} is not symmetric")
        if {a for a, _ in pairs} != set(range(u)):
            problems.append(f"block {k} does not have full domain")
        if {b for _, b in pairs} != set(range(u)):
            problems.append(f"block {k} does not have full range")
    if not masks:
        problems.append("no blocks given")
    elif seen != space.full_mask:
        problems.append("blocks do not cover U x U")
    if not 1 <= principal_index < len(masks):
        problems.append(f"principal index {principal_index} is not a non-diagonal block")
    if problems:
        raise MalformedInput("; ".join(problems))
    nondiag = list(range(1, len(masks)))
    if len(nondiag) > MAX_SUBALGEBRA_ATOMS:
        raise CapacityError("too many blocks")
    unit = _r_of(masks, set(nondiag), principal_index)
    A = FullSetAlgebra(space, unit)
    gens = []
    for bits in range(1 << len(nondiag)):
        X = {nondiag[i] for i in range(len(nondiag)) if bits >> i & 1}
        gens.append(_r_of(masks, X, principal_index))
    return PartitionAlgebra(A, masks, gens, generated_subalgebra(A, gens))


# --- supports and degrees ----------------------------------------------------------

@dataclass(frozen=True)
class DegreeReport:
    effective_degree: int
    local_degree: int
    effective_cardinality: int

    def to_json(self):
        return {"effective_degree": self.effective_degree,
                "local_degree": self.local_degree,
                "effective_cardinality": self.effective_cardinality}


def _require_square(A: BAO):
    if isinstance(A, FullSetAlgebra) and A.relativized:
        raise UnsupportedOperation("supports and degrees are only defined on full (square) units")


def minimal_support(A: BAO, x: int) -> DimensionSet:
    """Coordinates ``i`` with ``c_({i}) x != x``."""
    _require_square(A)
    return DimensionSet(A.dim, frozenset(i for i in range(A.dim) if A.cyl([i], x) != x))


def support_sizes(A: BAO) -> np.ndarray:
    """``|minimal_support(x)|`` for every element of the carrier, in carrier order."""
    _require_square(A)
    carr = A.carrier()
    sizes = np.zeros(len(carr), dtype=np.int64)
    for i in range(A.dim):
        sizes += A.cyl_table([i])[carr] != carr
    return sizes


def degree_report(A: BAO) -> DegreeReport:
    sizes = support_sizes(A)
    e = int(sizes.max()) if len(sizes) else 0
    c = neat_reduct(A, range(e)).carrier_size
    return DegreeReport(e, e + 1, c)


def non_additive_example() -> FiniteBAO:
    """The two-atom table algebra with a normal but non-additive substitution.

    Atoms ``a = 0b01`` and ``b = 0b10``.  ``c_({0})`` is the discriminator
    (``0 -> 0``, anything else ``-> 1``); the only substitution ``s_[0]`` is
    ``g`` with ``g(0)=0, g(a)=a, g(b)=b, g(1)=a``.
    """
    return FiniteBAO(1, 2, {(0,): [0, 3, 3, 3]}, {(0,): [0, 1, 2, 1]},
                     meta={"name": "non-additive g"})
