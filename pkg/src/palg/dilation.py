"""The functional dilation ``F(^beta alpha, A)`` of a finite algebra ``A``.

Elements are vectors of ``A``-elements indexed by the maps ``y: beta -> alpha``,
enumerated lexicographically with coordinate 0 most significant (exactly the
point order of ``^beta alpha``).  Boolean operations are pointwise and
substitutions act by precomposition, ``(s_sigma f)(y) = f(y o sigma)``.

Cylindrifiers exist only on *certified* elements ``s_sigma E(p)`` with
``sigma`` one-to-one on ``alpha``; they are computed by pulling the element
back into ``A`` along a permutation ``rho`` of ``beta`` that maps
``sigma[alpha]`` onto ``alpha``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .algebra import BAO
from .core import PointSpace, Transformation, iter_bits
from .errors import CapacityError, DimensionError, MalformedInput
from .termlang import Verdict

MAX_INDEX_MAPS = 1 << 12

CARDINAL_NOTE = (
    "The representation base should be a cardinal n >= the effective cardinality with "
    "sum_{s < local degree} n^s = n; no finite n satisfies this, so a finite beta is used "
    "and the cylindrification join may hold only as an inequality."
)


@dataclass(frozen=True, eq=False)
class DilationElement:
    dilation: "Dilation"
    values: np.ndarray
    cert: tuple | None = field(default=None)  # (sigma: Transformation of dim beta, p: int)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.int64)
        if v.shape != (self.dilation.size,):
            raise MalformedInput(f"dilation element needs {self.dilation.size} coordinates, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __eq__(self, other):
        return (isinstance(other, DilationElement) and other.dilation is self.dilation
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash(self.values.tobytes())

    def __and__(self, other):
        return DilationElement(self.dilation, self.values & other.values)

    def __or__(self, other):
        return DilationElement(self.dilation, self.values | other.values)

    def __invert__(self):
        return DilationElement(self.dilation, np.int64(self.dilation.A.unit) & ~self.values)

    def __le__(self, other):
        return bool(((self.values & ~other.values) == 0).all())

    def is_zero(self) -> bool:
        return not self.values.any()

    def is_unit(self) -> bool:
        return bool((self.values == self.dilation.A.unit).all())

    def nonzero_coordinates(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.values)]

    def atom_count(self) -> int:
        return int(sum(bin(int(v)).count("1") for v in self.values))

    def to_json(self):
        return {"bits": self.dilation.A.nbits, "values": [hex(int(v)) for v in self.values]}


@dataclass(frozen=True)
class DilationAtom:
    y_index: int
    y: tuple[int, ...]
    atom: int

    def element(self, D: "Dilation") -> DilationElement:
        v = np.zeros(D.size, dtype=np.int64)
        v[self.y_index] = self.atom
        return DilationElement(D, v)


@dataclass
class GapReport:
    equal: bool
    gamma: list
    p: int
    joinands: int
    defect: DilationElement  # dcyl minus the join
    excess: DilationElement  # join minus dcyl (zero in a polyadic algebra)
    degenerate: bool = False
    note: str = ""

    @property
    def defect_size(self) -> int:
        return self.defect.atom_count()

    def to_json(self):
        return {"equal": self.equal, "gamma": self.gamma, "p": hex(self.p),
                "joinands": self.joinands, "defect_atoms": self.defect_size,
                "defect_coordinates": len(self.defect.nonzero_coordinates()),
                "excess_atoms": self.excess.atom_count(),
                "degenerate": self.degenerate, "note": self.note}


class Dilation:
    """``F(^beta alpha, A)`` with lazily built index tables."""

    def __init__(self, A: BAO, beta: int):
        alpha = A.dim
        if alpha < 1:
            raise MalformedInput("dilations need dimension >= 1")
        if beta <= alpha:
            raise MalformedInput(f"beta = {beta} must exceed the dimension {alpha}")
        if alpha ** beta > MAX_INDEX_MAPS:
            raise CapacityError(f"{alpha}^{beta} index maps exceeds the bound {MAX_INDEX_MAPS}")
        self.A = A
        self.alpha = alpha
        self.beta = beta
        self.maps = PointSpace(beta, alpha)
        self.size = self.maps.point_count
        rows = self.maps.coords
        self.rows = rows
        square = PointSpace(alpha, alpha)
        self._taus = [Transformation(tuple(int(v) for v in square.decode(k))) for k in range(square.point_count)]
        self._restrict = square.encode_rows(rows[:, :alpha])
        self._stack = np.stack([A.subst_table(t) for t in self._taus])

    @property
    def degenerate(self) -> bool:
        return self.alpha == 1

    def __repr__(self):
        return f"Dilation({self.A!r}, beta={self.beta})"

    def y(self, index: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.rows[index])

    def y_index(self, y: Sequence[int]) -> int:
        return self.maps.encode(y)

    def element(self, values, cert=None) -> DilationElement:
        return DilationElement(self, values, cert)

    def zero(self) -> DilationElement:
        return DilationElement(self, np.zeros(self.size, dtype=np.int64))

    def unit(self) -> DilationElement:
        return DilationElement(self, np.full(self.size, self.A.unit, dtype=np.int64))

    # -- embedding and substitutions ----------------------------------------
    def embed(self, p: int) -> DilationElement:
        """``E(p)(y) = s_{y|alpha} p``."""
        if not self.A.contains(p):
            raise MalformedInput(f"{p:#x} is not an element of the base algebra")
        vals = self._stack[self._restrict, p]
        return DilationElement(self, vals, (Transformation.identity(self.beta), int(p)))

    def bar(self, tau) -> Transformation:
        """``tau`` in ``^alpha beta`` extended by the identity on ``beta - alpha``."""
        tau = tuple(int(t) for t in tau)
        if len(tau) != self.alpha or any(not 0 <= t < self.beta for t in tau):
            raise DimensionError(f"{list(tau)} is not a map from {self.alpha} to {self.beta}")
        return Transformation(tau + tuple(range(self.alpha, self.beta)))

    def as_sigma(self, sigma) -> Transformation:
        """Accept a map ``beta -> beta`` or a ``tau`` in ``^alpha beta`` (barred)."""
        if isinstance(sigma, Transformation) and sigma.dim == self.beta:
            return sigma
        entries = tuple(sigma)
        if len(entries) == self.beta:
            return Transformation(entries)
        if len(entries) == self.alpha:
            return self.bar(entries)
        raise DimensionError(f"{list(entries)} is neither a map on {self.beta} nor in ^{self.alpha}{self.beta}")

    def _precompose(self, sigma: Transformation) -> np.ndarray:
        return self.maps.encode_rows(self.rows[:, list(sigma.entries)])

    def dsubst(self, sigma, f: DilationElement) -> DilationElement:
        """``(s_sigma f)(y) = f(y o sigma)``."""
        sigma = self.as_sigma(sigma)
        vals = f.values[self._precompose(sigma)]
        cert = None
        if f.cert is not None:
            s0, p = f.cert
            cert = (_compose(s0, sigma), p)
        return DilationElement(self, vals, cert)

    def certified(self, sigma, p: int) -> DilationElement:
        """The element ``s_sigma E(p)`` together with its certificate."""
        sigma = self.as_sigma(sigma)
        e = self.embed(p)
        return DilationElement(self, e.values[self._precompose(sigma)], (sigma, int(p)))

    # -- cylindrification ------------------------------------------------------
    def _sigma_alpha(self, sigma: Transformation) -> list[int]:
        img = [sigma(i) for i in range(self.alpha)]
        if len(set(img)) != self.alpha:
            raise MalformedInput(f"certificate map {sigma!r} is not one-to-one on {self.alpha}")
        return img

    def least_rho(self, sigma) -> Transformation:
        """Lexicographically least permutation mapping ``sigma[alpha]`` onto ``alpha``."""
        sigma = self.as_sigma(sigma)
        sa = set(self._sigma_alpha(sigma))
        low = iter(range(self.alpha))
        high = iter(range(self.alpha, self.beta))
        return Transformation(tuple(next(low) if i in sa else next(high) for i in range(self.beta)))

    def valid_rhos(self, sigma, limit: int = 5040) -> list[Transformation]:
        """All permutations ``rho`` with ``rho[sigma[alpha]] = alpha``, lexicographic."""
        sigma = self.as_sigma(sigma)
        sa = sorted(set(self._sigma_alpha(sigma)))
        rest = [i for i in range(self.beta) if i not in sa]
        count = 1
        for k in range(2, self.alpha + 1):
            count *= k
        for k in range(2, self.beta - self.alpha + 1):
            count *= k
        if count > limit:
            raise CapacityError(f"{count} valid permutations exceeds the limit {limit}")
        out = []
        for lo in itertools.permutations(range(self.alpha)):
            for hi in itertools.permutations(range(self.alpha, self.beta)):
                ent = [0] * self.beta
                for i, v in zip(sa, lo):
                    ent[i] = v
                for i, v in zip(rest, hi):
                    ent[i] = v
                out.append(Transformation(tuple(ent)))
        out.sort(key=lambda t: t.entries)
        return out

    def _cert_of(self, q, check: bool = True) -> tuple[Transformation, int]:
        if isinstance(q, DilationElement):
            if q.cert is None:
                raise MalformedInput("cylindrification needs an element of the form s_sigma E(p) with its certificate")
            sigma, p = q.cert
            if check:
                expect = self.certified(sigma, p)
                if not np.array_equal(expect.values, q.values):
                    raise MalformedInput("certificate is inconsistent with the vector")
            return self.as_sigma(sigma), int(p)
        sigma, p = q
        return self.as_sigma(sigma), int(p)

    def dcyl(self, gamma, q, rho=None) -> DilationElement:
        """``c_(G) s_sigma p = s_{rho^-1} E(c_{rho(G n sigma[alpha])} s_{(rho sigma)|alpha} p)``.

        ``q`` is a certified element or a ``(sigma, p)`` pair; ``rho``
        defaults to :meth:`least_rho`.
        """
        gamma = frozenset(int(g) for g in gamma)
        if any(not 0 <= g < self.beta for g in gamma):
            raise DimensionError(f"{sorted(gamma)} is not a subset of {self.beta}")
        sigma, p = self._cert_of(q)
        sa = self._sigma_alpha(sigma)
        rho = self.least_rho(sigma) if rho is None else self.as_sigma(rho)
        if sorted(rho.entries) != list(range(self.beta)) or {rho(i) for i in sa} != set(range(self.alpha)):
            raise MalformedInput(f"{rho!r} is not a permutation mapping sigma[alpha] onto alpha")
        delta = [rho(g) for g in gamma if g in set(sa)]
        pi = Transformation(tuple(rho(sigma(i)) for i in range(self.alpha)))
        x = self.A.cyl(delta, self.A.subst(pi, p))
        inv = rho.inverse()
        return self.certified(inv, x)

    def rho_independent(self, gamma, q) -> bool:
        rhos = self.valid_rhos(self._cert_of(q)[0])
        first = self.dcyl(gamma, q, rhos[0])
        return all(self.dcyl(gamma, q, r) == first for r in rhos[1:])

    def certificates(self) -> Iterator[Transformation]:
        """Maps ``beta -> beta`` that are one-to-one on ``alpha``, lexicographic."""
        for ent in itertools.product(range(self.beta), repeat=self.beta):
            if len(set(ent[: self.alpha])) == self.alpha:
                yield Transformation(ent)

    def rho_independence_sweep(self, max_instances: int = 200_000) -> dict:
        """dcyl under every valid ``rho`` on every certified element and every ``G``."""
        carr = [int(p) for p in self.A.carrier()]
        certs = list(self.certificates())
        gammas = [frozenset(i for i in range(self.beta) if b >> i & 1) for b in range(1 << self.beta)]
        total = len(certs) * len(gammas) * len(carr)
        if total > max_instances:
            raise CapacityError(f"{total} instances exceeds max_instances={max_instances}")
        instances = agree = 0
        first_bad = None
        for sigma in certs:
            rhos = self.valid_rhos(sigma)
            for p in carr:
                q = self.certified(sigma, p)
                for g in gammas:
                    outs = [self.dcyl(g, q, r) for r in rhos]
                    instances += 1
                    if all(o == outs[0] for o in outs[1:]):
                        agree += 1
                    elif first_bad is None:
                        first_bad = {"sigma": sigma.to_list(), "p": hex(p), "gamma": sorted(g)}
        return {"instances": instances, "agree": agree, "passed": agree == instances,
                "rhos_per_instance": len(self.valid_rhos(certs[0])) if certs else 0,
                "first_mismatch": first_bad}

    # -- the cylindrification join and the atom join ---------------------------------
    def admissible_taus(self, gamma) -> list[tuple[int, ...]]:
        """``tau`` in ``^alpha beta`` with ``tau(i) = i`` off ``gamma``."""
        gamma = sorted(set(int(g) for g in gamma))
        if any(not 0 <= g < self.alpha for g in gamma):
            raise DimensionError(f"{gamma} is not a subset of {self.alpha}")
        out = []
        for choice in itertools.product(range(self.beta), repeat=len(gamma)):
            t = list(range(self.alpha))
            for g, v in zip(gamma, choice):
                t[g] = v
            out.append(tuple(t))
        return sorted(out)

    def check_eq1(self, gamma, p: int) -> GapReport:
        """Compare ``c_(G) E(p)`` with the join of ``s_taubar E(p)`` over admissible ``tau``."""
        taus = self.admissible_taus(gamma)
        e = self.embed(p)
        join = self.zero()
        for t in taus:
            join = join | self.dsubst(t, e)
        cyl = self.dcyl(gamma, e)
        defect, excess = cyl & ~join, join & ~cyl
        note = ""
        if self.degenerate:
            note = "dimension 1: the dilation has a single index map and the join is trivial"
        elif not defect.is_zero():
            note = "finite beta: the join falls short of the cylindrification"
        return GapReport(defect.is_zero() and excess.is_zero(), sorted(set(gamma)), int(p),
                         len(taus), defect, excess, self.degenerate, note)

    def check_eq2(self, tau) -> Verdict:
        """``sum{ s_taubar E(x) : x an atom of A } = 1``."""
        sigma = self.as_sigma(tau)
        total = self.zero()
        for a in self.A.atoms():
            total = total | self.dsubst(sigma, self.embed(a))
        label = f"eq2 {list(tau)}"
        miss = np.flatnonzero(total.values != self.A.unit)
        if len(miss):
            k = int(miss[0])
            return Verdict(False, self.size, {"y_index": k}, label, {"tau": list(tau)},
                           values={"join": int(total.values[k])},
                           note=f"coordinate y={list(self.y(k))} is not covered")
        return Verdict(True, self.size, label=label, instance={"tau": list(tau)})

    # -- atoms ------------------------------------------------------------------
    def atoms(self) -> Iterator[DilationAtom]:
        for k in range(self.size):
            for b in iter_bits(self.A.unit):
                yield DilationAtom(k, self.y(k), 1 << b)

    def atom_below(self, q: DilationElement, prefer=None) -> DilationAtom:
        """Least ``(coordinate, atom)`` under ``q``; ``prefer`` picks a coordinate first."""
        if q.is_zero():
            raise MalformedInput("the zero element has no atom below it")
        if prefer is not None:
            k = prefer if isinstance(prefer, (int, np.integer)) else self.y_index(prefer)
            v = int(q.values[k])
            if v:
                return DilationAtom(int(k), self.y(int(k)), v & -v)
        k = int(np.flatnonzero(q.values)[0])
        v = int(q.values[k])
        return DilationAtom(k, self.y(k), v & -v)

    def describe(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "index_maps": self.size,
                "base_atoms": len(self.A.atoms()), "degenerate": self.degenerate,
                "note": CARDINAL_NOTE}


def _compose(s0: Transformation, sigma: Transformation) -> Transformation:
    # f(y) = E(p)(y o s0), so (s_sigma f)(y) = E(p)(y o sigma o s0): certificate sigma o s0.
    return Transformation(tuple(sigma.entries[s0.entries[i]] for i in range(s0.dim)))
