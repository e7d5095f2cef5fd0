"""
Matroids, density and principal minors
======================================

A small tour of the rank oracles and of the densest-subset decomposition
that the principal-minors policy relies on.
"""

import numpy as np
from matsec.matroid import PartitionMatroid, UniformMatroid, circulant_graph, greedy_opt, triangle_with_pendant
from matsec.principal import density, principal_minors, soto_partition_matroid

# a graphic matroid is just an edge list; rank = size of a spanning forest
m = triangle_with_pendant()
print("rank", m.rank(), "of", m.n, "edges")
print("triangle independent?", m.is_independent({0, 1, 2}))

# density of a set is |S| / rank(S); the whole triangle has 3/2
print("density of the triangle:", density(m, {0, 1, 2}))

# principal minors peel off the densest part first
dec = principal_minors(m)
for part, gamma in zip(dec.parts, dec.densities):
    print("part", sorted(part), "density", gamma)

# the comparison partition matroid keeps each part with capacity = its rank
p = soto_partition_matroid(dec)
print("partition blocks", p.blocks, "capacities", p.capacities)

# greedy is optimal for any weight vector
w = [4, 3, 2, 1]
print("greedy OPT on M:", sorted(greedy_opt(m, w)), " on P:", sorted(greedy_opt(p, w)))

# a dense circulant graph: 13 vertices, 52 edges, rank 12
c = circulant_graph(13, [1, 2, 3, 4])
print("C13 rank", c.rank(), "density", density(c, range(c.n)))

# uniform and partition matroids with loops (a zero-capacity block)
q = PartitionMatroid([[0, 1, 2], [3, 4]], [1, 0])
print("loops", sorted(q.loops()), "rank", q.rank())
u = UniformMatroid(3, 7)
rng = np.random.default_rng(0)
print("random 4-set in U(3,7) has rank", u.rank(set(rng.choice(7, 4, replace=False).tolist())))
