import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (any_matroid, brute_max_weight, independent_by_definition, rank_by_definition,
                      subsets)
from matsec.matroid import (ExplicitMatroid, GraphicMatroid, PartitionMatroid, UniformMatroid,
                            WeightAssignment, circulant_graph, generic_rank, greedy_opt,
                            is_independent, load_matroid, loops_of, matroid_from_dict,
                            matroid_to_dict, minor, rank_of, set_weight, span_of, triangle,
                            triangle_with_pendant)


# -- worked examples -----------------------------------------------------------------

def test_independence_examples():
    assert is_independent(UniformMatroid(2, 4), {0, 3})
    assert not is_independent(PartitionMatroid([[0, 1], [2]], [1, 1]), {0, 1})
    assert not is_independent(triangle(), {0, 1, 2})
    assert is_independent(triangle(), {0, 2})


def test_rank_examples():
    assert rank_of(UniformMatroid(2, 4), {0, 1, 2}) == 2
    assert rank_of(triangle(), {0, 1, 2}) == 2
    assert rank_of(ExplicitMatroid(3, [[0, 1], [0, 2]]), {1, 2}) == 1


def test_span_examples():
    assert span_of(triangle(), {0, 1}) == {0, 1, 2}
    assert span_of(UniformMatroid(2, 4), {1, 3}) == {0, 1, 2, 3}
    m = PartitionMatroid([[0, 1], [2, 3]], [1, 0])
    assert span_of(m, set()) == loops_of(m) == {2, 3}


def test_greedy_examples():
    t = triangle()
    best = greedy_opt(t, [5, 3, 2])
    assert best == {0, 1} and set_weight(best, [5, 3, 2]) == 8
    p = PartitionMatroid([[0, 1, 2]], [1])
    assert greedy_opt(p, [9, 4, 1]) == {0}


def test_greedy_matches_brute_force_on_explicit(rng):
    # the rank-3 matroid of a 4-cycle plus a chord, given by its bases
    g = GraphicMatroid(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)])
    bases = [s for s in subsets(g.ground) if len(s) == 3 and independent_by_definition(g, s)]
    m = ExplicitMatroid(6, [sorted(b) for b in bases])
    for _ in range(20):
        w = rng.permutation(20)[:6].tolist()
        assert set_weight(greedy_opt(m, w), w) == brute_max_weight(m, w)


def test_minor_examples():
    t = triangle()
    c = minor(t, contract={0})
    assert c.ground == {1, 2}
    assert c.rank({1, 2}) == 1 and c.rank({1}) == 1 and c.rank({2}) == 1
    same = minor(t, restrict=t.ground)
    assert all(same.rank(s) == t.rank(s) for s in subsets(t.ground))
    tp = minor(triangle_with_pendant(), contract={0, 1, 2})
    assert tp.ground == {3} and tp.rank({3}) == 1 and not tp.loops()


def test_minor_rejects_overlap():
    with pytest.raises(ValueError):
        minor(triangle(), contract={0}, restrict={0, 1})


def test_out_of_range_elements_rejected():
    for m in (UniformMatroid(2, 4), triangle(), PartitionMatroid([[0], [1]], [1, 1]),
              ExplicitMatroid(2, [[0]])):
        with pytest.raises(ValueError):
            m.rank({7})
        with pytest.raises(ValueError):
            m.is_independent({-1})


def test_loops_in_each_family():
    assert GraphicMatroid(2, [(0, 0), (0, 1)]).loops() == {0}
    assert ExplicitMatroid(3, [[0, 1]]).loops() == {2}
    assert UniformMatroid(0, 3).loops() == {0, 1, 2}
    assert PartitionMatroid([[0, 1], [2]], [0, 1]).loops() == {0, 1}


def test_weight_assignment_validation():
    wa = WeightAssignment((5, 3, 1), (2, 0, 1))
    assert wa.as_list() == [1, 5, 3]
    assert wa.element_of(0) == 1
    with pytest.raises(ValueError):
        WeightAssignment((3, 3, 1), (0, 1, 2))
    with pytest.raises(ValueError):
        WeightAssignment((3, 2, 1), (0, 0, 2))
    assert WeightAssignment.from_element_weights([2, 7, 4]).weights == (7, 4, 2)


def test_json_round_trip(tmp_path):
    for m in (UniformMatroid(2, 5), triangle_with_pendant(), PartitionMatroid([[0, 2], [1]], [1, 1]),
              ExplicitMatroid(3, [[0, 1], [0, 2]])):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(matroid_to_dict(m)))
        back = load_matroid(path)
        assert all(back.rank(s) == m.rank(s) for s in subsets(m.ground))
    with pytest.raises(ValueError):
        matroid_from_dict({"type": "mystery"})


def test_trackers_follow_rank_on_circulant_graph():
    g = circulant_graph(9, [1, 2])
    t = g.tracker()
    for e in sorted(g.ground):
        t.try_add(e)
    assert len(t.members) == g.rank() == 8
    assert g.is_independent(t.members)


# -- properties against the definitions ------------------------------------------

@settings(max_examples=60, deadline=None)
@given(any_matroid(max_n=7))
def test_rank_agrees_with_definition_and_generic_oracle(m):
    for s in subsets(m.ground):
        r = m.rank(s)
        assert r == rank_by_definition(m, s)
        assert r == generic_rank(m, s)
        assert m.is_independent(s) == independent_by_definition(m, s)


@settings(max_examples=60, deadline=None)
@given(any_matroid(max_n=7))
def test_matroid_axioms(m):
    indep = [s for s in subsets(m.ground) if m.is_independent(s)]
    indep_set = set(indep)
    assert frozenset() in indep_set
    for s in indep:
        for e in s:
            assert s - {e} in indep_set  # hereditary
    for a, b in itertools.product(indep, indep):
        if len(a) < len(b):
            assert any(a | {x} in indep_set for x in b - a)  # exchange


@settings(max_examples=60, deadline=None)
@given(any_matroid(max_n=8), st.data())
def test_submodular_and_span(m, data):
    ground = sorted(m.ground)
    a = frozenset(data.draw(st.sets(st.sampled_from(ground))) if ground else set())
    b = frozenset(data.draw(st.sets(st.sampled_from(ground))) if ground else set())
    assert m.rank(a | b) + m.rank(a & b) <= m.rank(a) + m.rank(b)
    sp = m.span(a)
    assert a <= sp and m.rank(sp) == m.rank(a)
    assert m.span(sp) == sp
    assert m.span(frozenset()) == m.loops()


@settings(max_examples=60, deadline=None)
@given(any_matroid(max_n=8), st.data())
def test_greedy_optimal(m, data):
    w = data.draw(st.permutations(list(range(1, m.n + 1))))
    best = greedy_opt(m, w)
    assert m.is_independent(best)
    assert set_weight(best, w) == brute_max_weight(m, w)


@settings(max_examples=40, deadline=None)
@given(any_matroid(max_n=7), st.data())
def test_minor_is_a_matroid_with_the_contraction_rank(m, data):
    ground = sorted(m.ground)
    c = frozenset(data.draw(st.sets(st.sampled_from(ground))) if ground else set())
    rest = sorted(m.ground - c)
    r = frozenset(data.draw(st.sets(st.sampled_from(rest))) if rest else set())
    mm = minor(m, c, r)
    assert mm.ground == r
    for s in subsets(r):
        assert mm.rank(s) == m.rank(s | c) - m.rank(c)
    indep = {s for s in subsets(r) if mm.is_independent(s)}
    for a in indep:
        for e in a:
            assert a - {e} in indep
        for b in indep:
            if len(a) < len(b):
                assert any(a | {x} in indep for x in b - a)
    t = mm.tracker()
    for e in sorted(r):
        t.try_add(e)
    assert len(t.members) == mm.rank()
