"""Coordinate transformations, dimension sets, point spaces and bitmask elements.

Conventions used throughout the package:

* ``compose(sigma, tau)(i) == sigma(tau(i))``; with set semantics this gives
  ``s_sigma(s_tau X) == s_{sigma o tau} X``.
* A point ``s`` of ``^alpha U`` has index ``sum(s[i] * u**(alpha-1-i))``, so
  coordinate 0 is the most significant digit.
* An element is a Python ``int`` used as a bitmask; bit ``k`` is point ``k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, DimensionError, MalformedInput

MAX_POINTS = 1 << 16


@dataclass(frozen=True)
class Transformation:
    """A total map on ``{0, ..., dim-1}``, stored as its one-line entries."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        n = len(entries)
        for e in entries:
            if not 0 <= e < n:
                raise DimensionError(f"entry {e} is not a coordinate of dimension {n}")

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __call__(self, i: int) -> int:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return f"Transformation({list(self.entries)})"

    @classmethod
    def identity(cls, dim: int) -> "Transformation":
        return cls(tuple(range(dim)))

    @classmethod
    def all(cls, dim: int) -> Iterator["Transformation"]:
        """Every map in ``^dim dim`` in lexicographic order of entries."""
        for entries in itertools.product(range(dim), repeat=dim):
            yield cls(entries)

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable[tuple[int, int]]) -> "Transformation":
        """Map the listed coordinates, fix all unlisted ones."""
        entries = list(range(dim))
        for i, j in pairs:
            if not (0 <= i < dim and 0 <= j < dim):
                raise DimensionError(f"pair {i}:{j} out of range for dimension {dim}")
            entries[i] = j
        return cls(tuple(entries))

    def compose(self, other: "Transformation") -> "Transformation":
        return compose(self, other)

    def is_identity(self) -> bool:
        return all(e == i for i, e in enumerate(self.entries))

    def is_injective(self) -> bool:
        return len(set(self.entries)) == len(self.entries)

    is_bijective = is_injective

    def inverse(self) -> "Transformation":
        if not self.is_injective():
            raise ValueError(f"{self!r} is not a bijection")
        inv = [0] * self.dim
        for i, e in enumerate(self.entries):
            inv[e] = i
        return Transformation(tuple(inv))

    def support(self) -> frozenset[int]:
        return frozenset(i for i, e in enumerate(self.entries) if e != i)

    def preimage(self, coords: Iterable[int]) -> frozenset[int]:
        target = set(coords)
        return frozenset(i for i, e in enumerate(self.entries) if e in target)

    def image(self, coords: Iterable[int] | None = None) -> frozenset[int]:
        if coords is None:
            return frozenset(self.entries)
        return frozenset(self.entries[i] for i in coords)

    def kernel_partition(self) -> list[frozenset[int]]:
        return kernel_partition(self)

    def to_list(self) -> list[int]:
        return list(self.entries)


def as_transformation(value, dim: int | None = None) -> Transformation:
    t = value if isinstance(value, Transformation) else Transformation(tuple(value))
    if dim is not None and t.dim != dim:
        raise DimensionError(f"transformation of dimension {t.dim} used in dimension {dim}")
    return t


def compose(sigma: Transformation, tau: Transformation) -> Transformation:
    """``(sigma o tau)(i) = sigma(tau(i))``."""
    if sigma.dim != tau.dim:
        raise DimensionError(f"cannot compose dimensions {sigma.dim} and {tau.dim}")
    return Transformation(tuple(sigma.entries[t] for t in tau.entries))


def kernel_partition(tau: Transformation) -> list[frozenset[int]]:
    """Classes of ``i ~ j  iff  tau(i) == tau(j)``, ordered by least member."""
    classes: dict[int, list[int]] = {}
    for i, e in enumerate(tau.entries):
        classes.setdefault(e, []).append(i)
    return sorted((frozenset(c) for c in classes.values()), key=min)


@dataclass(frozen=True)
class DimensionSet:
    dim: int
    members: frozenset[int]

    def __post_init__(self):
        members = frozenset(int(m) for m in self.members)
        object.__setattr__(self, "members", members)
        bad = [m for m in members if not 0 <= m < self.dim]
        if bad:
            raise DimensionError(f"coordinates {sorted(bad)} outside dimension {self.dim}")

    @classmethod
    def all(cls, dim: int) -> Iterator["DimensionSet"]:
        """All subsets of ``{0..dim-1}``, ordered by their bitmask."""
        for bits in range(1 << dim):
            yield cls(dim, frozenset(i for i in range(dim) if bits >> i & 1))

    @classmethod
    def full(cls, dim: int) -> "DimensionSet":
        return cls(dim, frozenset(range(dim)))

    @property
    def bits(self) -> int:
        return sum(1 << i for i in self.members)

    def complement(self) -> "DimensionSet":
        return DimensionSet(self.dim, frozenset(range(self.dim)) - self.members)

    def union(self, other: "DimensionSet") -> "DimensionSet":
        if other.dim != self.dim:
            raise DimensionError("dimension sets of different dimensions")
        return DimensionSet(self.dim, self.members | other.members)

    def __contains__(self, i):
        return i in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        return f"DimensionSet({self.dim}, {self.key()})"

    def key(self) -> str:
        return "{" + ",".join(str(i) for i in sorted(self.members)) + "}"

    def to_list(self) -> list[int]:
        return sorted(self.members)


def as_dimset(value, dim: int) -> DimensionSet:
    if isinstance(value, DimensionSet):
        if value.dim != dim:
            raise DimensionError(f"dimension set of dimension {value.dim} used in dimension {dim}")
        return value
    return DimensionSet(dim, frozenset(value))


@dataclass(frozen=True)
class PointSpace:
    """The point set ``^dim U`` with ``|U| = base``."""

    dim: int
    base: int

    def __post_init__(self):
        if self.dim < 0 or self.base < 1:
            raise MalformedInput("point spaces need dim >= 0 and base >= 1")
        if self.base ** self.dim > MAX_POINTS:
            raise CapacityError(
                f"^{self.dim}{self.base} has {self.base ** self.dim} points; limit is {MAX_POINTS}"
            )

    @property
    def point_count(self) -> int:
        return self.base ** self.dim

    @property
    def full_mask(self) -> int:
        return (1 << self.point_count) - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.base,) * self.dim

    def encode(self, s: Sequence[int]) -> int:
        if len(s) != self.dim:
            raise DimensionError(f"point {tuple(s)} does not have {self.dim} coordinates")
        n = 0
        for v in s:
            if not 0 <= v < self.base:
                raise DimensionError(f"coordinate value {v} outside base {self.base}")
            n = n * self.base + v
        return n

    def decode(self, n: int) -> tuple[int, ...]:
        if not 0 <= n < self.point_count:
            raise DimensionError(f"point index {n} outside 0..{self.point_count - 1}")
        out = []
        for _ in range(self.dim):
            n, r = divmod(n, self.base)
            out.append(r)
        return tuple(reversed(out))

    @cached_property
    def coords(self) -> np.ndarray:
        """``(point_count, dim)`` array; row ``k`` is ``decode(k)``."""
        if self.dim == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.shape).reshape(self.dim, -1).T
        return np.ascontiguousarray(grids, dtype=np.int64)

    def encode_rows(self, rows: np.ndarray) -> np.ndarray:
        weights = self.base ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)
        return rows @ weights if self.dim else np.zeros(len(rows), dtype=np.int64)

    def subst_index(self, tau: Transformation) -> np.ndarray:
        """``idx[k]`` is the index of ``decode(k) o tau``."""
        tau = as_transformation(tau, self.dim)
        return self.encode_rows(self.coords[:, list(tau.entries)])

    def mask_of_points(self, points: Iterable[Sequence[int]]) -> int:
        m = 0
        for s in points:
            m |= 1 << self.encode(s)
        return m

    def points_of_mask(self, mask: int) -> list[tuple[int, ...]]:
        return [self.decode(k) for k in iter_bits(mask)]


# --- bitmask helpers -------------------------------------------------------

def iter_bits(mask: int) -> Iterator[int]:
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def lowest_bit(mask: int) -> int:
    return mask & -mask


def bits_of(mask: int, n: int) -> np.ndarray:
    """Bool vector of length ``n`` (index 0 = least significant bit)."""
    if n == 0:
        return np.zeros(0, dtype=bool)
    raw = mask.to_bytes((n + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


def mask_of(bits: np.ndarray) -> int:
    bits = np.asarray(bits, dtype=bool).ravel()
    if bits.size == 0:
        return 0
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def submasks(mask: int) -> list[int]:
    """All submasks of ``mask`` in increasing numeric order."""
    positions = list(iter_bits(mask))
    out = []
    for combo in range(1 << len(positions)):
        m = 0
        for j, p in enumerate(positions):
            if combo >> j & 1:
                m |= 1 << p
        out.append(m)
    out.sort()
    return out


@dataclass(frozen=True)
class Element:
    """A bitmask with an explicit bit length, used for serialization."""

    bits: int
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.bits:
            raise MalformedInput(f"mask {self.mask:#x} does not fit in {self.bits} bits")

    def to_json(self) -> dict:
        return {"bits": self.bits, "hex": hex(self.mask)}

    @classmethod
    def from_json(cls, obj) -> "Element":
        return cls(int(obj["bits"]), parse_mask(obj["hex"]))


def parse_mask(text) -> int:
    """Accept ints, ``0x..`` hex strings, ``0b..`` binary or decimal strings."""
    if isinstance(text, (int, np.integer)):
        return int(text)
    s = str(text).strip().lower()
    try:
        return int(s, 0)
    except ValueError:
        raise MalformedInput(f"not a mask literal: {text!r}") from None
