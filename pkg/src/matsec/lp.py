"""Exact linear programs for the unknown-n secretary problem.

Variables are ``p_1..p_N`` and ``alpha``; the objective maximises ``alpha``.
The full program has a guarantee row per length ``n`` and a feasibility row
per position ``i``; the weakened program swaps the feasibility rows for a
single ``sum p_i <= 1``.  Solving is a dense tableau simplex over
:class:`fractions.Fraction` with Bland's rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .classical import AcceptanceSchedule, harmonic

__all__ = [
    "Constraint",
    "RationalLP",
    "LPSolution",
    "build_secretary_lp",
    "solve_lp_exact",
    "policy_from_lp",
    "lower_bound",
    "upper_bound",
    "MAX_N",
]

MAX_N = 64


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple  # one Fraction per variable
    sense: str  # "<=" or ">="
    rhs: Fraction
    label: str = ""

    def holds(self, x) -> bool:
        lhs = sum((c * v for c, v in zip(self.coeffs, x)), Fraction(0))
        return lhs <= self.rhs if self.sense == "<=" else lhs >= self.rhs

    def describe(self, names) -> str:
        terms = []
        for c, name in zip(self.coeffs, names):
            if c == 0:
                continue
            if c == 1:
                terms.append(name)
            elif c == -1:
                terms.append(f"-{name}")
            else:
                terms.append(f"{c}*{name}")
        lhs = " + ".join(terms).replace("+ -", "- ") or "0"
        return f"{lhs} {self.sense} {self.rhs}"


@dataclass(frozen=True)
class RationalLP:
    """maximise ``objective . x`` subject to ``constraints`` and ``x >= 0``."""

    names: tuple
    objective: tuple
    constraints: tuple
    N: int
    weakened: bool = False

    def describe(self) -> list:
        return [c.describe(self.names) for c in self.constraints]


@dataclass(frozen=True)
class LPSolution:
    status: str
    alpha: Fraction | None = None
    p: tuple = ()
    pivots: int = 0


def build_secretary_lp(N: int, weakened: bool = False) -> RationalLP:
    if N < 1:
        raise ValueError("N must be at least 1")
    names = tuple(f"p{i}" for i in range(1, N + 1)) + ("alpha",)
    width = N + 1
    rows = []
    for n in range(1, N + 1):
        # (1/n) sum_{i<=n} i p_i >= alpha
        coeffs = [Fraction(0)] * width
        for i in range(1, n + 1):
            coeffs[i - 1] = Fraction(i, n)
        coeffs[N] = Fraction(-1)
        rows.append(Constraint(tuple(coeffs), ">=", Fraction(0), f"guarantee n={n}"))
    if weakened:
        coeffs = [Fraction(1)] * N + [Fraction(0)]
        rows.append(Constraint(tuple(coeffs), "<=", Fraction(1), "total mass"))
    else:
        for i in range(1, N + 1):
            # sum_{j<i} p_j + i p_i <= 1
            coeffs = [Fraction(0)] * width
            for j in range(1, i):
                coeffs[j - 1] = Fraction(1)
            coeffs[i - 1] = Fraction(i)
            rows.append(Constraint(tuple(coeffs), "<=", Fraction(1), f"feasibility i={i}"))
    objective = tuple([Fraction(0)] * N + [Fraction(1)])
    return RationalLP(names, objective, tuple(rows), N, weakened)


def _simplex(A, b, c):
    """Maximise c.x s.t. A x <= b, x >= 0, with b >= 0 (origin feasible).

    Returns (status, x, pivots).  Bland's rule: entering variable is the
    lowest-index column with positive reduced cost, leaving row breaks ratio
    ties by lowest basic-variable index.
    """
    m, n = len(A), len(c)
    # tableau columns: n structural + m slack
    T = [list(A[i]) + [Fraction(int(i == k)) for k in range(m)] + [b[i]] for i in range(m)]
    cost = list(c) + [Fraction(0)] * m
    basis = [n + i for i in range(m)]
    pivots = 0
    while True:
        # reduced costs for the current basis
        reduced = list(cost)
        for i, bv in enumerate(basis):
            cb = cost[bv]
            if cb:
                row = T[i]
                for j in range(n + m):
                    if row[j]:
                        reduced[j] -= cb * row[j]
        entering = next((j for j in range(n + m) if reduced[j] > 0), None)
        if entering is None:
            break
        best = None
        for i in range(m):
            a = T[i][entering]
            if a > 0:
                key = (T[i][-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded", None, pivots
        r = best[1]
        pr = T[r]
        piv = pr[entering]
        if piv != 1:
            T[r] = pr = [v / piv for v in pr]
        for i in range(m):
            if i != r:
                f = T[i][entering]
                if f:
                    row = T[i]
                    T[i] = [v - f * w if w else v for v, w in zip(row, pr)]
        basis[r] = entering
        pivots += 1
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i][-1]
    return "optimal", x, pivots


def solve_lp_exact(lp: RationalLP) -> LPSolution:
    """Exact optimum of a secretary LP; the solution is re-verified before return."""
    if lp.N > MAX_N:
        raise ValueError(f"exact solving is limited to N <= {MAX_N}")
    A, b = [], []
    for con in lp.constraints:
        sign = 1 if con.sense == "<=" else -1
        A.append([sign * v for v in con.coeffs])
        b.append(sign * con.rhs)
    if any(v < 0 for v in b):
        raise ValueError("only programs whose origin is feasible are supported")
    status, x, pivots = _simplex(A, b, list(lp.objective))
    if status != "optimal":
        return LPSolution(status, pivots=pivots)
    for con in lp.constraints:
        if not con.holds(x):
            raise ArithmeticError(f"solver returned a point violating {con.label}")
    if any(v < 0 for v in x):
        raise ArithmeticError("solver returned a negative variable")
    alpha = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
    return LPSolution("optimal", alpha, tuple(x[:lp.N]), pivots)


def policy_from_lp(sol) -> AcceptanceSchedule:
    """Acceptance schedule q_i = i p_i / (1 - sum_{j<i} p_j).

    Accepts an :class:`LPSolution` or a plain sequence of p values.  A zero
    denominator only arises once all mass is spent; q_i is then 0.
    """
    p = sol.p if isinstance(sol, LPSolution) else tuple(sol)
    p = [Fraction(v) for v in p]
    q = []
    prefix = Fraction(0)
    for i, pi in enumerate(p, start=1):
        if pi < 0 or prefix + i * pi > 1:
            raise ValueError(f"p violates the feasibility row at i={i}")
        rest = 1 - prefix
        q.append(Fraction(0) if rest == 0 else i * pi / rest)
        prefix += pi
    return AcceptanceSchedule(tuple(q))


def lower_bound(N: int) -> Fraction:
    """1 / (H_{N-1} + 1): achieved by the harmonic policy."""
    return 1 / (harmonic(N - 1) + 1)


def upper_bound(N: int) -> Fraction:
    """1 / H_N: no policy does better."""
    return 1 / harmonic(N)
