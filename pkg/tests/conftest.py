"""Independent oracles shared by the test modules.

Everything here is computed straight from definitions (subset enumeration,
graph search, permutation walks) and never calls the code under test beyond
reading a matroid's public description.
"""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from matsec.matroid import ExplicitMatroid, GraphicMatroid, PartitionMatroid, UniformMatroid


def subsets(elements):
    elements = sorted(elements)
    for k in range(len(elements) + 1):
        for c in itertools.combinations(elements, k):
            yield frozenset(c)


def independent_by_definition(m, s):
    """Independence read off each family's defining description."""
    s = frozenset(s)
    if isinstance(m, UniformMatroid):
        return len(s) <= m.r
    if isinstance(m, PartitionMatroid):
        return all(len(s & frozenset(b)) <= c for b, c in zip(m.blocks, m.capacities))
    if isinstance(m, GraphicMatroid):
        return forest_rank(m.edges, s) == len(s)
    if isinstance(m, ExplicitMatroid):
        return any(s <= frozenset(b) for b in m.bases)
    raise TypeError(type(m))


def forest_rank(edges, s):
    """|touched vertices| - |components| by breadth-first search, self loops ignored."""
    adj = {}
    for e in s:
        u, v = edges[e]
        if u == v:
            continue
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    seen, comps = set(), 0
    for start in adj:
        if start in seen:
            continue
        comps += 1
        stack = [start]
        seen.add(start)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return len(seen) - comps


def rank_by_definition(m, s):
    s = frozenset(s)
    return max(len(t) for t in subsets(s) if independent_by_definition(m, t))


def brute_max_weight(m, weights):
    best = 0
    for s in subsets(m.ground):
        if independent_by_definition(m, s):
            best = max(best, sum(weights[e] for e in s))
    return best


def brute_densest(m):
    """(densest set, density): the largest, then lexicographically first, of
    all maximum-density subsets.  Without loops the densest sets are closed
    under union, so that choice is also their union."""
    best, members = None, []
    for s in subsets(m.ground):
        r = m.rank(s)
        if r == 0:
            continue
        d = Fraction(len(s), r)
        if best is None or d > best:
            best, members = d, [s]
        elif d == best:
            members.append(s)
    pick = min(members, key=lambda s: (-len(s), sorted(s)))
    if not m.loops():
        assert pick == frozenset().union(*members)
    return pick, best


def enumerate_success(q, n):
    """Single-choice success probability by brute force over all rank orders,
    drawing the policy's coin explicitly at every record."""
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        # probability mass of each (alive) state
        alive = Fraction(1)
        best_so_far = -1
        for i, v in enumerate(perm):
            if v > best_so_far:
                best_so_far = v
                take = alive * Fraction(q[i])
                if v == n - 1:
                    total += take
                alive -= take
    return total / math.factorial(n)


def exhaustive_random_assignment_opt(m, values):
    """E over all bijections of max-weight independent set, by brute force."""
    total = Fraction(0)
    perms = list(itertools.permutations(values))
    for p in perms:
        total += brute_max_weight(m, p)
    return total / len(perms)


# -- hypothesis strategies -------------------------------------------------------

@st.composite
def uniform_matroids(draw, max_n=8):
    n = draw(st.integers(0, max_n))
    r = draw(st.integers(0, n))
    return UniformMatroid(r, n)


@st.composite
def partition_matroids(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    labels = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    blocks = [[e for e in range(n) if labels[e] == b] for b in sorted(set(labels))]
    caps = [draw(st.integers(0, len(b))) for b in blocks]
    return PartitionMatroid(blocks, caps)


@st.composite
def graphic_matroids(draw, max_n=8):
    v = draw(st.integers(1, 5))
    n = draw(st.integers(0, max_n))
    edges = [tuple(draw(st.tuples(st.integers(0, v - 1), st.integers(0, v - 1)))) for _ in range(n)]
    return GraphicMatroid(v, edges)


@st.composite
def explicit_matroids(draw, max_n=7):
    """Partition, graphic or uniform matroids re-encoded by their list of bases."""
    inner = draw(st.one_of(partition_matroids(max_n), graphic_matroids(max_n), uniform_matroids(max_n)))
    r = inner.rank()
    bases = [s for s in subsets(inner.ground) if len(s) == r and independent_by_definition(inner, s)]
    return ExplicitMatroid(inner.n, [sorted(b) for b in bases])


def any_matroid(max_n=8):
    return st.one_of(uniform_matroids(max_n), partition_matroids(max_n),
                     graphic_matroids(max_n), explicit_matroids(min(max_n, 7)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
