"""Single-choice secretary policies that act only on best-so-far records.

A policy is an :class:`AcceptanceSchedule`: ``q[i-1]`` is the probability of
taking candidate ``i`` when it beats everything seen so far and nothing has
been taken yet.  Evaluators return exact fractions.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "harmonic",
    "AcceptanceSchedule",
    "PolicyProfile",
    "harmonic_policy",
    "one_over_e_policy",
    "evaluate_policy_exact",
    "evaluate_policy_enumeration",
    "simulate_policy",
    "ENUMERATION_LIMIT",
]

ENUMERATION_LIMIT = 8


_HARMONIC = [Fraction(0)]


def harmonic(n: int) -> Fraction:
    """H_n as an exact fraction, H_0 = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    while len(_HARMONIC) <= n:
        _HARMONIC.append(_HARMONIC[-1] + Fraction(1, len(_HARMONIC)))
    return _HARMONIC[n]


@dataclass(frozen=True)
class PolicyProfile:
    """``p[i-1]`` = P(skip the first i-1 candidates and take candidate i)."""

    p: tuple

    def is_feasible(self) -> bool:
        prefix = 0
        for i, pi in enumerate(self.p, start=1):
            if pi < 0 or prefix + i * pi > 1:
                return False
            prefix += pi
        return True

    def guarantee(self, n: int):
        """(1/n) * sum_{i<=n} i p_i, the success probability at length n."""
        return sum((i * pi for i, pi in enumerate(self.p[:n], start=1)), Fraction(0)) / n


@dataclass(frozen=True)
class AcceptanceSchedule:
    q: tuple

    def __post_init__(self):
        q = tuple(Fraction(x) if not isinstance(x, float) else x for x in self.q)
        if any(x < 0 or x > 1 for x in q):
            raise ValueError("acceptance probabilities must lie in [0, 1]")
        object.__setattr__(self, "q", q)

    def __len__(self):
        return len(self.q)

    def __getitem__(self, i):
        return self.q[i]

    def profile(self, n: int | None = None) -> PolicyProfile:
        """Induced p_i = (q_i / i) * prod_{j<i} (1 - q_j / j)."""
        n = len(self.q) if n is None else n
        alive = Fraction(1)
        p = []
        for i in range(1, n + 1):
            take = self.q[i - 1] / i
            p.append(alive * take)
            alive *= 1 - take
        return PolicyProfile(tuple(p))


def harmonic_policy(N: int) -> AcceptanceSchedule:
    """q_i = 1 / (H_{N-1} + 1 - H_{i-1}) for i = 1..N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    top = harmonic(N - 1) + 1
    return AcceptanceSchedule(tuple(1 / (top - harmonic(i - 1)) for i in range(1, N + 1)))


def harmonic_profile(N: int) -> PolicyProfile:
    top = harmonic(N - 1) + 1
    return PolicyProfile(tuple(1 / (i * top) for i in range(1, N + 1)))


def one_over_e_policy(n: int) -> AcceptanceSchedule:
    """Skip the first floor(n/e) candidates, then take the first record."""
    if n < 1:
        raise ValueError("n must be at least 1")
    k = math.floor(n / math.e)
    return AcceptanceSchedule(tuple(Fraction(0) if i <= k else Fraction(1) for i in range(1, n + 1)))


def evaluate_policy_exact(s: AcceptanceSchedule, n: int) -> Fraction:
    """Success probability on ``n`` candidates via independence of record indicators."""
    if n < 1 or n > len(s):
        raise ValueError(f"n must lie in 1..{len(s)}")
    return s.profile(n).guarantee(n)


def evaluate_policy_enumeration(s: AcceptanceSchedule, n: int) -> Fraction:
    """Success probability by summing over all n! relative-rank orders.

    Independent of :func:`evaluate_policy_exact`: every permutation is walked
    once to tally its record positions, and each tally is then weighted by the
    chance of passing all earlier records and taking the last one.
    """
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration is limited to n <= {ENUMERATION_LIMIT}")
    if n < 1 or n > len(s):
        raise ValueError(f"n must lie in 1..{len(s)}")
    total = Fraction(0)
    for records, count in _record_patterns(n).items():
        alive = Fraction(1)
        for i in records[:-1]:
            alive *= 1 - Fraction(s.q[i])
        # the overall best is always the last record
        total += count * alive * Fraction(s.q[records[-1]])
    return total / math.factorial(n)


@lru_cache(maxsize=None)
def _record_patterns(n: int) -> dict:
    """Count the n! orders by their tuple of record positions."""
    counts = Counter()
    for perm in itertools.permutations(range(n)):
        running = -1
        records = []
        for i, v in enumerate(perm):
            if v > running:
                running = v
                records.append(i)
        counts[tuple(records)] += 1
    return dict(counts)


def simulate_policy(s: AcceptanceSchedule, n: int, trials: int, rng: np.random.Generator) -> float:
    """Monte Carlo success rate over uniformly random rank orders."""
    if n < 1 or n > len(s):
        raise ValueError(f"n must lie in 1..{len(s)}")
    q = np.array([float(x) for x in s.q[:n]])
    vals = np.argsort(rng.random((trials, n)), axis=1)
    prev_max = np.maximum.accumulate(vals, axis=1)
    record = np.empty_like(vals, dtype=bool)
    record[:, 0] = True
    record[:, 1:] = vals[:, 1:] > prev_max[:, :-1]
    take = record & (rng.random((trials, n)) < q)
    took_any = take.any(axis=1)
    first = np.argmax(take, axis=1)
    best = np.argmax(vals, axis=1)
    return float(np.mean(took_any & (first == best)))
