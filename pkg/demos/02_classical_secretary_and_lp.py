"""
Single-choice secretary: harmonic policy and the LP
===================================================

When only an upper bound N on the stream length is known, the harmonic
schedule succeeds with the same probability for every n <= N.  The LP value
sits between the two harmonic bounds.
"""

import numpy as np
from matsec.classical import evaluate_policy_exact, harmonic_policy, one_over_e_policy, simulate_policy
from matsec.lp import build_secretary_lp, lower_bound, solve_lp_exact, upper_bound

N = 10
s = harmonic_policy(N)
print("q_i =", [str(q) for q in s.q])

# flat success curve: exactly 1 / (H_{N-1} + 1) at every n
for n in (1, 3, 7, 10):
    print(n, evaluate_policy_exact(s, n))

# the classic 1/e rule only works when n is known
e = one_over_e_policy(N)
print("1/e rule at n=N:", float(evaluate_policy_exact(e, N)), " at n=3:", float(evaluate_policy_exact(e, 3)))

# Monte Carlo agrees with the exact value
rng = np.random.default_rng(1)
print("simulated:", simulate_policy(s, 7, 50_000, rng), "exact:", float(evaluate_policy_exact(s, 7)))

# LP optimum between the two bounds
for N in (2, 5, 12):
    sol = solve_lp_exact(build_secretary_lp(N))
    print(f"N={N}: {float(lower_bound(N)):.4f} <= alpha={float(sol.alpha):.4f} <= {float(upper_bound(N)):.4f}")
print("\n".join(build_secretary_lp(3).describe()))
