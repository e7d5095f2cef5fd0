"""
Online matroid policies through the experiment harness
======================================================

Each experiment is a plain dict; the harness seeds every trial separately
so reruns and sharded runs give the same report.
"""

from matsec import run_experiment, worstcase_order_search

# Alg1 on a uniformly dense matroid, adversarial reverse order
rep = run_experiment({"matroid": {"type": "uniform", "r": 16, "n": 64},
                      "policy": {"name": "alg1"},
                      "order": {"model": "heuristic", "name": "reverse"},
                      "trials": 2000, "seed": 0,
                      "bound": {"kind": "top_r_fraction", "factor": 0.025}})
print("alg1: mean", rep.mean, "+-", round(rep.stderr, 2), "pass", rep.passed)
print("top-4 acceptance freq", [rep.acceptance_frequency(k) for k in range(4)])

# Alg3 only needs a bound L on the top weight; midpoint of the top two is valid
cfg = {"matroid": {"type": "graphic", "vertices": 4,
                   "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]},
       "policy": {"name": "alg3", "L": "midpoint"},
       "weights": {"model": "explicit", "values": [6, 5, 4, 3, 2, 1]},
       "assignment": "identity", "trials": 1}
order, worst = worstcase_order_search(cfg)
print("alg3 worst order", order, "exact value", worst.mean, "OPT", worst.mean_opt)

# unknown n: guess 2^i with polynomial tail, then run a known-n policy
red = run_experiment({"matroid": {"type": "uniform", "r": 4, "n": 32},
                      "policy": {"name": "unknown-n-reduction", "eps": 0.5, "base": "threshold-price"},
                      "trials": 2000, "seed": 2})
print("reduction: ratio", round(red.ratio, 2))
print(red.to_csv().splitlines()[:3])
