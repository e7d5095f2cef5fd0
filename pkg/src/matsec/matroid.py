"""Matroid oracles over integer-indexed ground sets.

Every matroid here answers rank queries; independence and span are derived
from rank.  Families with cheap structure (uniform, partition, graphic)
compute rank directly, and each family can hand out an incremental
independence tracker for the greedy loops that the online policies run.

Element sets are passed as any iterable of ints and handled internally as
frozensets.  Minors keep the element ids of the parent matroid.
"""
from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "Matroid",
    "UniformMatroid",
    "PartitionMatroid",
    "GraphicMatroid",
    "ExplicitMatroid",
    "Minor",
    "WeightAssignment",
    "is_independent",
    "rank_of",
    "span_of",
    "loops_of",
    "greedy_opt",
    "minor",
    "generic_rank",
    "matroid_from_dict",
    "matroid_to_dict",
    "load_matroid",
]


class Matroid:
    """Base class: subclasses set ``ground`` and implement ``_rank``."""

    ground: frozenset

    @property
    def n(self) -> int:
        return len(self.ground)

    def _check(self, s) -> frozenset:
        s = frozenset(s)
        if not s <= self.ground:
            bad = sorted(s - self.ground)
            raise ValueError(f"elements {bad} are outside the ground set")
        return s

    def rank(self, s=None) -> int:
        if s is None:
            return self._rank(self.ground)
        return self._rank(self._check(s))

    def is_independent(self, s) -> bool:
        s = self._check(s)
        return self._rank(s) == len(s)

    def span(self, s) -> frozenset:
        s = self._check(s)
        base = self._rank(s)
        out = set(s)
        for e in self.ground - s:
            if self._rank(s | {e}) == base:
                out.add(e)
        return frozenset(out)

    def loops(self) -> frozenset:
        return frozenset(e for e in self.ground if self._rank(frozenset((e,))) == 0)

    def is_loop(self, e) -> bool:
        return self.rank((e,)) == 0

    def tracker(self) -> "IndependenceTracker":
        """Incremental independence checker for a growing independent set."""
        return _RankTracker(self)

    def minor(self, contract=(), restrict=None) -> "Matroid":
        return minor(self, contract, restrict)

    def _rank(self, s: frozenset) -> int:  # pragma: no cover - abstract
        raise NotImplementedError


class IndependenceTracker:
    """Maintains an independent set ``members`` that only grows."""

    def can_add(self, e) -> bool:
        raise NotImplementedError

    def add(self, e) -> None:
        raise NotImplementedError

    def try_add(self, e) -> bool:
        if self.can_add(e):
            self.add(e)
            return True
        return False


class _RankTracker(IndependenceTracker):
    def __init__(self, m: Matroid):
        self.m = m
        self.members = set()

    def can_add(self, e) -> bool:
        if e in self.members:
            return False
        s = self.m._check(self.members | {e})
        return self.m._rank(s) == len(s)

    def add(self, e) -> None:
        if not self.can_add(e):
            raise ValueError(f"adding {e} breaks independence")
        self.members.add(e)


def _ground_from(n=None, ground=None) -> frozenset:
    if ground is not None:
        return frozenset(int(e) for e in ground)
    if n is None or n < 0:
        raise ValueError("n must be a nonnegative count")
    return frozenset(range(n))


class UniformMatroid(Matroid):
    """U(r, n): every set of at most ``r`` elements is independent."""

    def __init__(self, r: int, n: int | None = None, *, ground=None):
        if r < 0:
            raise ValueError("rank must be nonnegative")
        self.ground = _ground_from(n, ground)
        self.r = min(r, len(self.ground))

    def _rank(self, s):
        return min(len(s), self.r)

    def span(self, s):
        s = self._check(s)
        return self.ground if len(s) >= self.r else s

    def loops(self):
        return frozenset() if self.r > 0 else self.ground

    def tracker(self):
        return _CountTracker(self)

    def __repr__(self):
        return f"UniformMatroid(r={self.r}, n={self.n})"


class _CountTracker(IndependenceTracker):
    def __init__(self, m: UniformMatroid):
        self.m = m
        self.members = set()

    def can_add(self, e):
        if e not in self.m.ground:
            raise ValueError(f"element {e} is outside the ground set")
        return e not in self.members and len(self.members) < self.m.r

    def add(self, e):
        if not self.can_add(e):
            raise ValueError(f"adding {e} breaks independence")
        self.members.add(e)


class PartitionMatroid(Matroid):
    """Blocks with capacities; a zero-capacity block holds loops.

    The blocks must be disjoint; their union is the ground set.
    """

    def __init__(self, blocks: Sequence[Iterable[int]], capacities: Sequence[int]):
        blocks = [frozenset(int(e) for e in b) for b in blocks]
        capacities = [int(c) for c in capacities]
        if len(blocks) != len(capacities):
            raise ValueError("need one capacity per block")
        if any(c < 0 for c in capacities):
            raise ValueError("capacities must be nonnegative")
        owner = {}
        for j, b in enumerate(blocks):
            for e in b:
                if e in owner:
                    raise ValueError(f"element {e} appears in two blocks")
                owner[e] = j
        self.blocks = blocks
        self.capacities = capacities
        self.owner = owner
        self.ground = frozenset(owner)

    def _rank(self, s):
        counts = [0] * len(self.blocks)
        for e in s:
            counts[self.owner[e]] += 1
        return sum(min(k, c) for k, c in zip(counts, self.capacities))

    def loops(self):
        return frozenset().union(*(b for b, c in zip(self.blocks, self.capacities) if c == 0))

    def tracker(self):
        return _BlockTracker(self)

    def __repr__(self):
        sizes = [len(b) for b in self.blocks]
        return f"PartitionMatroid(block_sizes={sizes}, capacities={self.capacities})"


class _BlockTracker(IndependenceTracker):
    def __init__(self, m: PartitionMatroid):
        self.m = m
        self.members = set()
        self.used = [0] * len(m.blocks)

    def can_add(self, e):
        j = self.m.owner.get(e)
        if j is None:
            raise ValueError(f"element {e} is outside the ground set")
        return e not in self.members and self.used[j] < self.m.capacities[j]

    def add(self, e):
        if not self.can_add(e):
            raise ValueError(f"adding {e} breaks independence")
        self.members.add(e)
        self.used[self.m.owner[e]] += 1


class _Components:
    """Disjoint-set forest over vertex labels, created lazily."""

    __slots__ = ("parent",)

    def __init__(self):
        self.parent = {}

    def find(self, v):
        parent = self.parent
        root = v
        while parent.get(root, root) != root:
            root = parent[root]
        while v != root:
            v, parent[v] = parent[v], root
        return root

    def union(self, u, v) -> bool:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        self.parent[ru] = rv
        return True


class GraphicMatroid(Matroid):
    """Cycle matroid of a multigraph; edge ``i`` is element ``i``.

    Self-loop edges are matroid loops.  Rank is the size of a spanning forest
    of the chosen edges, found by merging vertex components.
    """

    def __init__(self, vertices: int, edges: Sequence[Sequence[int]]):
        edges = [(int(u), int(v)) for u, v in edges]
        for u, v in edges:
            if not (0 <= u < vertices and 0 <= v < vertices):
                raise ValueError(f"edge ({u}, {v}) uses a vertex outside 0..{vertices - 1}")
        self.vertices = vertices
        self.edges = edges
        self.ground = frozenset(range(len(edges)))

    def _rank(self, s):
        comp = _Components()
        edges = self.edges
        return sum(comp.union(*edges[e]) for e in s)

    def loops(self):
        return frozenset(i for i, (u, v) in enumerate(self.edges) if u == v)

    def tracker(self):
        return _ForestTracker(self)

    def __repr__(self):
        return f"GraphicMatroid(vertices={self.vertices}, edges={len(self.edges)})"


class _ForestTracker(IndependenceTracker):
    def __init__(self, m: GraphicMatroid):
        self.m = m
        self.members = set()
        self.comp = _Components()

    def can_add(self, e):
        if e not in self.m.ground:
            raise ValueError(f"element {e} is outside the ground set")
        u, v = self.m.edges[e]
        return e not in self.members and self.comp.find(u) != self.comp.find(v)

    def add(self, e):
        if not self.can_add(e):
            raise ValueError(f"adding {e} breaks independence")
        self.members.add(e)
        self.comp.union(*self.m.edges[e])


class ExplicitMatroid(Matroid):
    """Matroid given by its list of bases; rank(S) = max |S ∩ B|."""

    def __init__(self, n: int, bases: Iterable[Iterable[int]]):
        self.ground = _ground_from(n)
        self.bases = [frozenset(int(e) for e in b) for b in bases]
        if not self.bases:
            raise ValueError("a matroid has at least one basis")
        sizes = {len(b) for b in self.bases}
        if len(sizes) != 1:
            raise ValueError("all bases must have the same size")
        for b in self.bases:
            self._check(b)

    def _rank(self, s):
        return max(len(s & b) for b in self.bases)

    def __repr__(self):
        return f"ExplicitMatroid(n={self.n}, bases={len(self.bases)})"


class Minor(Matroid):
    """(M / contract) | restrict, with rank_M(S ∪ C) - rank_M(C)."""

    def __init__(self, base: Matroid, contract: frozenset, restrict: frozenset):
        self.base = base
        self.contract = contract
        self.ground = restrict
        self._offset = base._rank(contract)

    def _rank(self, s):
        return self.base._rank(s | self.contract) - self._offset

    def tracker(self):
        inner = self.base.tracker()
        for e in self.contract:
            inner.try_add(e)
        return _MinorTracker(self, inner)

    def __repr__(self):
        return f"Minor({self.base!r}, contract={sorted(self.contract)}, restrict={sorted(self.ground)})"


class _MinorTracker(IndependenceTracker):
    # S is independent in M/C iff S plus a basis of C is independent in M
    def __init__(self, m: Minor, inner: IndependenceTracker):
        self.m = m
        self.inner = inner
        self.members = set()

    def can_add(self, e):
        if e not in self.m.ground:
            raise ValueError(f"element {e} is outside the ground set")
        return e not in self.members and self.inner.can_add(e)

    def add(self, e):
        if not self.can_add(e):
            raise ValueError(f"adding {e} breaks independence")
        self.inner.add(e)
        self.members.add(e)


def minor(m: Matroid, contract=(), restrict=None) -> Matroid:
    """The minor (m / contract) | restrict.

    Uniform and partition matroids stay in their family: contracting ``C``
    lowers each capacity by the part of ``C`` it already uses.
    """
    contract = m._check(contract)
    restrict = m.ground - contract if restrict is None else m._check(restrict)
    if contract & restrict:
        raise ValueError("contract and restrict sets must be disjoint")
    if isinstance(m, UniformMatroid):
        return UniformMatroid(max(m.r - len(contract), 0), ground=restrict)
    if isinstance(m, PartitionMatroid):
        blocks, caps = [], []
        for b, c in zip(m.blocks, m.capacities):
            kept = b & restrict
            if kept:
                blocks.append(kept)
                caps.append(max(c - len(b & contract), 0))
        return PartitionMatroid(blocks, caps)
    return Minor(m, contract, restrict)


def is_independent(m: Matroid, s) -> bool:
    return m.is_independent(s)


def rank_of(m: Matroid, s) -> int:
    return m.rank(s)


def span_of(m: Matroid, s) -> frozenset:
    return m.span(s)


def loops_of(m: Matroid) -> frozenset:
    return m.loops()


def generic_rank(m: Matroid, s) -> int:
    """Rank computed only through independence queries (greedy build-up)."""
    kept = []
    for e in sorted(frozenset(s)):
        if m.is_independent(kept + [e]):
            kept.append(e)
    return len(kept)


@dataclass(frozen=True)
class WeightAssignment:
    """A strictly decreasing weight list and a bijection element -> position.

    ``assignment[e]`` is the index into ``weights`` held by element ``e``,
    so ``wa[e]`` is that element's weight.
    """

    weights: tuple
    assignment: tuple

    def __post_init__(self):
        w = tuple(self.weights)
        a = tuple(int(i) for i in self.assignment)
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        if any(w[i] <= w[i + 1] for i in range(len(w) - 1)):
            raise ValueError("weights must be strictly decreasing")
        if sorted(a) != list(range(len(w))):
            raise ValueError("assignment must be a bijection onto the weight list")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "assignment", a)

    @classmethod
    def identity(cls, weights):
        return cls(tuple(weights), tuple(range(len(weights))))

    @classmethod
    def from_element_weights(cls, values):
        """Build from per-element weights (``values[e]`` is e's weight)."""
        order = sorted(range(len(values)), key=lambda e: -values[e])
        weights = tuple(values[e] for e in order)
        assignment = [0] * len(values)
        for pos, e in enumerate(order):
            assignment[e] = pos
        return cls(weights, tuple(assignment))

    def __getitem__(self, e):
        return self.weights[self.assignment[e]]

    def __len__(self):
        return len(self.assignment)

    def element_of(self, position: int) -> int:
        """Element holding the ``position``-th largest weight (0-based)."""
        return self.assignment.index(position)

    def as_list(self) -> list:
        return [self[e] for e in range(len(self))]


def _weight(w, e):
    return w[e]


def greedy_opt(m: Matroid, w) -> frozenset:
    """Maximum-weight independent set by the matroid greedy algorithm.

    ``w`` maps element ids to weights (sequence, mapping or
    :class:`WeightAssignment`).  Ties are broken by element id so the result
    is deterministic; under strictly distinct weights it is the unique optimum.
    """
    order = sorted(m.ground, key=lambda e: (-_weight(w, e), e))
    t = m.tracker()
    for e in order:
        t.try_add(e)
    return frozenset(t.members)


def set_weight(s, w):
    return sum((_weight(w, e) for e in s), 0)


# -- JSON file format ---------------------------------------------------------

def matroid_from_dict(d: Mapping) -> Matroid:
    kind = d.get("type")
    if kind == "uniform":
        return UniformMatroid(int(d["r"]), int(d["n"]))
    if kind == "partition":
        m = PartitionMatroid(d["blocks"], d["capacities"])
        if m.ground != frozenset(range(len(m.ground))):
            raise ValueError("partition blocks must cover elements 0..n-1 exactly")
        return m
    if kind == "graphic":
        return GraphicMatroid(int(d["vertices"]), d["edges"])
    if kind == "explicit":
        return ExplicitMatroid(int(d["n"]), d["bases"])
    raise ValueError(f"unknown matroid type {kind!r}")


def matroid_to_dict(m: Matroid) -> dict:
    if isinstance(m, UniformMatroid):
        return {"type": "uniform", "n": m.n, "r": m.r}
    if isinstance(m, PartitionMatroid):
        return {"type": "partition",
                "blocks": [sorted(b) for b in m.blocks],
                "capacities": list(m.capacities)}
    if isinstance(m, GraphicMatroid):
        return {"type": "graphic", "vertices": m.vertices,
                "edges": [list(e) for e in m.edges]}
    if isinstance(m, ExplicitMatroid):
        return {"type": "explicit", "n": m.n, "bases": [sorted(b) for b in m.bases]}
    raise TypeError(f"{type(m).__name__} has no file representation")


def load_matroid(path) -> Matroid:
    with open(Path(path)) as fh:
        return matroid_from_dict(json.load(fh))


# -- handy constructors used across tests and demos ---------------------------

def triangle() -> GraphicMatroid:
    return GraphicMatroid(3, [(0, 1), (1, 2), (0, 2)])


def triangle_with_pendant() -> GraphicMatroid:
    """Triangle on vertices 0,1,2 (edges 0..2) plus pendant edge 3 = (2,3)."""
    return GraphicMatroid(4, [(0, 1), (1, 2), (0, 2), (2, 3)])


def circulant_graph(vertices: int, offsets: Iterable[int]) -> GraphicMatroid:
    edges = []
    for v in range(vertices):
        for d in offsets:
            edges.append((v, (v + d) % vertices))
    return GraphicMatroid(vertices, edges)


def all_subsets(elements):
    elements = sorted(elements)
    for k in range(len(elements) + 1):
        for c in itertools.combinations(elements, k):
            yield frozenset(c)
