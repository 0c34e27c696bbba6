"""Random table generators for property tests."""

from palg.algebra import FiniteBAO, additive_extension
from palg.core import DimensionSet, Transformation


def op_keys(dim):
    gammas = [tuple(g.members) for g in DimensionSet.all(dim) if g.members]
    taus = [t.entries for t in Transformation.all(dim) if not t.is_identity()]
    return gammas, taus


def random_tables(rng, dim, n):
    """Arbitrary operator tables on a powerset of ``n`` atoms."""
    gammas, taus = op_keys(dim)
    size = 1 << n
    cyl = {g: rng.integers(0, size, size) for g in gammas}
    sub = {t: rng.integers(0, size, size) for t in taus}
    for tab in list(cyl.values()) + list(sub.values()):
        tab[0] = 0 if rng.random() < 0.8 else tab[0]
    return FiniteBAO(dim, n, cyl, sub)


def random_additive(rng, dim, n):
    gammas, taus = op_keys(dim)
    size = 1 << n
    cyl = {g: [int(v) for v in rng.integers(0, size, n)] for g in gammas}
    sub = {t: [int(v) for v in rng.integers(0, size, n)] for t in taus}
    return FiniteBAO.from_atom_images(dim, n, cyl, sub)


def endomorphism_images(rng, n):
    """Atom images of a Boolean endomorphism: ``s(a_i) = {j : phi(j) = i}``."""
    phi = rng.integers(0, n, n)
    return [sum(1 << j for j in range(n) if phi[j] == i) for i in range(n)]


def random_p6(rng, dim, n):
    """Substitutions are Boolean endomorphisms; cylindrifications arbitrary."""
    gammas, taus = op_keys(dim)
    size = 1 << n
    cyl = {g: rng.integers(0, size, size) for g in gammas}
    sub = {t: additive_extension(endomorphism_images(rng, n), n) for t in taus}
    return FiniteBAO(dim, n, cyl, sub)
