"""
The hard distribution for unknown n
===================================

Weights 2^(gamma j) with probability 2^-j.  OPT grows like 2^(gamma l) at the
l-th stopping point, and any fixed single-choice rule falls behind on some
stopping point as N grows.
"""

import math
from matsec.hardness import SINGLE_CHOICE_POLICIES, expected_max_exact, hardness_sweep

g = 0.25
for level in (0, 4, 8, 12):
    print(level, round(expected_max_exact(g, 2 ** level), 3), ">=", round((1 - 1 / math.e) * 2 ** (g * level), 3))

for L in (6, 10):
    rep = hardness_sweep(SINGLE_CHOICE_POLICIES, 2 ** L, gamma=g, trials=500, seed=0)
    for name in rep.alg:
        level, ratio = rep.worst(name)
        print(f"N=2^{L} {name}: worst ratio {ratio:.2f} at level {level}")
