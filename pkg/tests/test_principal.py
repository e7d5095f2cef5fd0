import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import any_matroid, brute_densest, brute_max_weight, subsets
from matsec.matroid import (GraphicMatroid, PartitionMatroid, UniformMatroid, circulant_graph,
                            triangle, triangle_with_pendant)
from matsec.principal import (UndefinedDensity, densest_subset, density, is_uniformly_dense,
                              principal_minors, soto_partition_matroid)


def test_density_examples():
    assert density(triangle(), {0, 1, 2}) == Fraction(3, 2)
    assert density(UniformMatroid(2, 4), range(4)) == 2
    assert density(triangle(), {1}) == 1
    with pytest.raises(UndefinedDensity):
        density(GraphicMatroid(1, [(0, 0)]), {0})


def test_densest_subset_examples():
    assert densest_subset(triangle_with_pendant()) == ({0, 1, 2}, Fraction(3, 2))
    assert densest_subset(UniformMatroid(2, 4)) == ({0, 1, 2, 3}, 2)
    s, d = densest_subset(PartitionMatroid([[0, 1, 2], [3]], [1, 1]))
    assert s == {0, 1, 2} and d == 3
    with pytest.raises(UndefinedDensity):
        densest_subset(UniformMatroid(0, 3))


def test_uniformly_dense_examples():
    assert is_uniformly_dense(UniformMatroid(3, 7))
    assert not is_uniformly_dense(triangle_with_pendant())
    assert is_uniformly_dense(PartitionMatroid([[0, 1], [2, 3]], [1, 1]))
    assert not is_uniformly_dense(GraphicMatroid(2, [(0, 0), (0, 1)]))  # has a loop


def test_principal_minors_examples():
    d = principal_minors(triangle_with_pendant())
    assert d.parts == [{0, 1, 2}, {3}]
    assert [p.rank for p in d.minors] == [2, 1]
    assert d.densities == [Fraction(3, 2), 1]
    d = principal_minors(PartitionMatroid([[0, 1, 2, 3], [4, 5]], [1, 1]))
    assert d.parts == [{0, 1, 2, 3}, {4, 5}] and d.densities == [4, 2]
    u = UniformMatroid(3, 6)
    d = principal_minors(u)
    assert len(d.minors) == 1 and d.parts[0] == u.ground and d.minors[0].rank == 3


def test_soto_partition_examples():
    p = soto_partition_matroid(principal_minors(triangle_with_pendant()))
    assert sorted(map(sorted, p.blocks)) == [[0, 1, 2], [3]]
    assert dict(zip(map(frozenset, p.blocks), p.capacities)) == {frozenset({0, 1, 2}): 2, frozenset({3}): 1}
    u = UniformMatroid(2, 5)
    p = soto_partition_matroid(principal_minors(u))
    assert len(p.blocks) == 1 and p.capacities == (2,) or list(p.capacities) == [2]


def test_soto_partition_keeps_loops_as_zero_capacity_block():
    m = GraphicMatroid(3, [(0, 1), (1, 1), (1, 2), (0, 2)])
    d = principal_minors(m)
    assert d.loops == {1}
    p = soto_partition_matroid(d)
    assert p.ground == m.ground and p.loops() == {1}


def test_partition_opt_loses_at_most_one_over_e():
    """Exact expectation over all 4! bijections of weights 4,3,2,1."""
    m = triangle_with_pendant()
    p = soto_partition_matroid(principal_minors(m))
    perms = list(itertools.permutations([4, 3, 2, 1]))
    opt_m = Fraction(sum(brute_max_weight(m, w) for w in perms), len(perms))
    opt_p = Fraction(sum(brute_max_weight(p, w) for w in perms), len(perms))
    assert opt_p >= (1 - 1 / math.e) * opt_m


def test_graphic_closed_form_matches_brute_force_on_dense_graph():
    g = circulant_graph(7, [1, 2, 3])  # K7, 21 edges, past the brute-force limit
    s, d = densest_subset(g)
    assert s == g.ground and d == Fraction(21, 6)
    assert is_uniformly_dense(g)


def test_graphic_closed_form_finds_dense_core():
    # K5 (10 edges, rank 4) with a path of three edges hanging off it
    k5 = [(a, b) for a in range(5) for b in range(a + 1, 5)]
    tail = [(4, 5), (5, 6), (6, 7)]
    extra = [(7, 8), (8, 9), (9, 10), (10, 11), (11, 12), (12, 13), (13, 14), (14, 15)]
    g = GraphicMatroid(16, k5 + tail + extra)
    assert g.n > 20
    s, d = densest_subset(g)
    assert s == frozenset(range(10)) and d == Fraction(10, 4)


@settings(max_examples=50, deadline=None)
@given(any_matroid(max_n=8))
def test_densest_subset_matches_brute_force(m):
    if m.rank() == 0:
        return
    s, d = densest_subset(m)
    bs, bd = brute_densest(m)
    assert d == bd and s == bs


@settings(max_examples=50, deadline=None)
@given(any_matroid(max_n=8))
def test_principal_sequence_properties(m):
    d = principal_minors(m)
    parts = d.parts
    seen = set()
    for part in parts:
        assert not (seen & part)
        seen |= part
    assert seen | d.loops == m.ground and not (seen & d.loops)
    dens = d.densities
    assert all(a >= b for a, b in zip(dens, dens[1:]))
    for p in d.minors:
        assert is_uniformly_dense(p.matroid)
        assert p.rank == p.matroid.rank() and p.density == Fraction(len(p.elements), p.rank)
    p = soto_partition_matroid(d)
    assert p.rank() == m.rank()


@settings(max_examples=30, deadline=None)
@given(any_matroid(max_n=6))
def test_partition_opt_bound_on_random_matroids(m):
    if m.rank() == 0:
        return
    p = soto_partition_matroid(principal_minors(m))
    values = list(range(m.n, 0, -1))
    perms = list(itertools.permutations(values))
    opt_m = sum(brute_max_weight(m, w) for w in perms)
    opt_p = sum(brute_max_weight(p, w) for w in perms)
    assert opt_p >= (1 - 1 / math.e) * opt_m
