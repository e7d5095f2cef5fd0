"""Density, densest subsets and the principal-minor decomposition.

All densities are exact :class:`fractions.Fraction` values.  The densest set
returned is always the largest one: sets of maximum density are closed under
union (they minimise the submodular function ``rho * rank(S) - |S|``), so
the maximum-cardinality densest set is unique and the lexicographic
tie-break never has to fire.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .matroid import (
    GraphicMatroid,
    Matroid,
    PartitionMatroid,
    UniformMatroid,
    minor,
)

__all__ = [
    "density",
    "densest_subset",
    "is_uniformly_dense",
    "PrincipalMinor",
    "PrincipalDecomposition",
    "principal_minors",
    "soto_partition_matroid",
    "BRUTE_FORCE_LIMIT",
]

BRUTE_FORCE_LIMIT = 20
GRAPH_VERTEX_LIMIT = 16


class UndefinedDensity(ValueError):
    """Raised for sets of rank zero."""


def density(m: Matroid, s) -> Fraction:
    s = frozenset(s)
    r = m.rank(s)
    if r == 0:
        raise UndefinedDensity("density of a rank-zero set is undefined")
    return Fraction(len(s), r)


def _better(cand, best):
    # (density, size, sorted tuple): higher density, then larger, then lexicographically smaller
    if best is None:
        return True
    if cand[0] != best[0]:
        return cand[0] > best[0]
    if len(cand[1]) != len(best[1]):
        return len(cand[1]) > len(best[1])
    return cand[1] < best[1]


def _densest_brute(m: Matroid):
    ground = sorted(m.ground)
    if len(ground) > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"brute-force densest subset is limited to {BRUTE_FORCE_LIMIT} elements "
            f"(got {len(ground)}); use a uniform, partition or small graphic matroid")
    best = None
    for k in range(1, len(ground) + 1):
        for c in itertools.combinations(ground, k):
            s = frozenset(c)
            r = m._rank(s)
            if r == 0:
                continue
            cand = (Fraction(k, r), c)
            if _better(cand, best):
                best = cand
    if best is None:
        raise UndefinedDensity("every element is a loop")
    return frozenset(best[1]), best[0]


def _densest_partition(m: PartitionMatroid):
    ratios = []
    for b, c in zip(m.blocks, m.capacities):
        if c > 0:
            ratios.append((Fraction(len(b), min(len(b), c)), b))
    if not ratios:
        raise UndefinedDensity("every element is a loop")
    best = max(r for r, _ in ratios)
    s = frozenset().union(*(b for r, b in ratios if r == best))
    return s, best


def _densest_graphic(m: GraphicMatroid):
    # A max-density edge set is closed, so it is a union of vertex-induced
    # edge sets; the best single induced set already attains the maximum.
    incident = {}
    for e, (u, v) in enumerate(m.edges):
        incident.setdefault(u, []).append(e)
        incident.setdefault(v, []).append(e)
    verts = sorted(incident)
    best, members = None, []
    for k in range(2, len(verts) + 1):
        for c in itertools.combinations(verts, k):
            cs = set(c)
            s = frozenset(e for v in c for e in incident[v]
                          if m.edges[e][0] in cs and m.edges[e][1] in cs)
            if not s:
                continue
            r = m._rank(s)
            if r == 0:
                continue
            d = Fraction(len(s), r)
            if best is None or d > best:
                best, members = d, [s]
            elif d == best:
                members.append(s)
    if best is None:
        raise UndefinedDensity("graph has no edges")
    return frozenset().union(*members), best


def densest_subset(m: Matroid):
    """Return ``(S, gamma(S))`` for the largest set of maximum density.

    Closed forms cover uniform and loop-free partition matroids; loop-free
    graphic matroids on at most 16 vertices enumerate vertex subsets; any
    other matroid is brute-forced over at most 20 elements.
    """
    if isinstance(m, UniformMatroid):
        if m.r == 0:
            raise UndefinedDensity("every element is a loop")
        return m.ground, Fraction(m.n, m.r)
    if isinstance(m, PartitionMatroid) and not m.loops():
        return _densest_partition(m)
    if (isinstance(m, GraphicMatroid) and not m.loops()
            and len({v for e in m.edges for v in e}) <= GRAPH_VERTEX_LIMIT
            and m.n > BRUTE_FORCE_LIMIT):
        return _densest_graphic(m)
    return _densest_brute(m)


def is_uniformly_dense(m: Matroid) -> bool:
    if m.n == 0 or m.loops():
        return False
    _, best = densest_subset(m)
    return best == density(m, m.ground)


@dataclass(frozen=True)
class PrincipalMinor:
    elements: frozenset
    matroid: Matroid
    rank: int
    density: Fraction


@dataclass(frozen=True)
class PrincipalDecomposition:
    """Ordered principal minors plus the loop remainder."""

    minors: tuple
    loops: frozenset = field(default_factory=frozenset)

    @property
    def densities(self):
        return [p.density for p in self.minors]

    @property
    def parts(self):
        return [p.elements for p in self.minors]

    def owner(self) -> dict:
        """Map element -> index of the minor containing it."""
        return {e: i for i, p in enumerate(self.minors) for e in p.elements}


def principal_minors(m: Matroid) -> PrincipalDecomposition:
    """Repeatedly restrict to the densest set of the contraction and contract it.

    Loops never enter a minor; they are collected in ``loops``.
    """
    remainder = set(m.loops())
    remaining = m.ground - remainder
    contracted = frozenset()
    out = []
    while remaining:
        current = minor(m, contracted, remaining)
        new_loops = current.loops()
        if new_loops:
            remainder |= new_loops
            remaining -= new_loops
            continue
        s, gamma = densest_subset(current)
        piece = minor(m, contracted, s)
        out.append(PrincipalMinor(s, piece, piece.rank(), gamma))
        contracted |= s
        remaining -= s
    return PrincipalDecomposition(tuple(out), frozenset(remainder))


def soto_partition_matroid(d: PrincipalDecomposition) -> PartitionMatroid:
    """Partition matroid with block E_i of capacity r_i for every minor.

    Loops of the decomposed matroid form a zero-capacity block so the ground
    set is unchanged.
    """
    blocks = [p.elements for p in d.minors]
    caps = [p.rank for p in d.minors]
    if d.loops:
        blocks.append(d.loops)
        caps.append(0)
    return PartitionMatroid(blocks, caps)
