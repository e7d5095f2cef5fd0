"""The i.i.d. hard distribution for unknown stream lengths.

Weights take value ``w_j = 2^(gamma j)`` with probability ``2^-j``.  The
adversary streams blocks of sizes 2, 4, 8, ... and may stop after any block,
so the stream length is one of ``n_l = 2^(l+1) - 2``.  A single-choice policy
that does not know where the stream stops loses a growing factor against the
offline maximum; :func:`hardness_sweep` measures that loss for a family of
policies.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .classical import AcceptanceSchedule, one_over_e_policy

__all__ = [
    "HardInstance",
    "hard_instance",
    "gamma_for",
    "default_j_max",
    "expected_max_exact",
    "expected_max_tail_bound",
    "stopping_point",
    "max_level",
    "ScheduleRule",
    "ThresholdRule",
    "SINGLE_CHOICE_POLICIES",
    "single_choice_policy",
    "hardness_sweep",
    "HardnessReport",
    "best_two_draw_ratio",
]

SAMPLE_BITS = 64  # one raw 64-bit word per draw resolves probabilities down to 2^-64
TAIL_TOLERANCE = 1e-12


def stopping_point(level: int) -> int:
    """Stream length after ``level`` blocks: 2 + 4 + ... + 2^level."""
    return 2 ** (level + 1) - 2


def max_level(N: int) -> int:
    """Largest level whose stopping point fits in a stream of length at most N."""
    level = 0
    while stopping_point(level + 1) <= N:
        level += 1
    return level


def gamma_for(N: int) -> float:
    """gamma = 1 / log2 log2 N."""
    if N <= 4:
        raise ValueError("N must exceed 4 so that log2 log2 N > 1")
    return 1 / math.log2(math.log2(N))


def _check_gamma(gamma):
    if not 0 < gamma < 1 / 3:
        raise ValueError(f"gamma must lie in (0, 1/3), got {gamma}")


def expected_max_tail_bound(gamma: float, m: int, j_max: int) -> float:
    """Upper bound on the mass the truncated sum misses: m * sum_{j > j_max} w_j 2^-j."""
    r = 2.0 ** (gamma - 1)
    return m * r ** (j_max + 1) / (1 - r)


def default_j_max(gamma: float, m: int = 1) -> int:
    """Smallest truncation whose tail bound is below 1e-12 of E[w] (a lower bound on the max)."""
    _check_gamma(gamma)
    r = 2.0 ** (gamma - 1)
    mean = r / (1 - r)
    j = 1
    while expected_max_tail_bound(gamma, m, j) > TAIL_TOLERANCE * mean:
        j += 1
    return j


def expected_max_exact(gamma: float, m: int, j_max: int | None = None) -> float:
    """E[max of m draws] = sum_j w_j (F(j)^m - F(j-1)^m), F(j) = 1 - 2^-j.

    The sum is cut at ``j_max``; :func:`expected_max_tail_bound` bounds the
    remainder.  Differences of powers are taken through ``expm1`` so that
    terms with F close to one keep full relative precision.
    """
    _check_gamma(gamma)
    if m < 1:
        raise ValueError("m must be at least 1")
    if j_max is None:
        j_max = default_j_max(gamma, m)
    j = np.arange(1, j_max + 1, dtype=float)
    # F(j)^m - 1 = expm1(m log1p(-2^-j)); F(0)^m - 1 = -1
    cur = np.expm1(m * np.log1p(-(2.0 ** -j)))
    prev = np.concatenate(([-1.0], cur[:-1]))
    w = 2.0 ** (gamma * j)
    return math.fsum((w * (cur - prev)).tolist())


def _bit_length(u: np.ndarray) -> np.ndarray:
    x = u.astype(np.uint64)
    n = np.zeros(x.shape, dtype=np.int64)
    for s in (32, 16, 8, 4, 2, 1):
        big = x >= np.uint64(1 << s)
        x = np.where(big, x >> np.uint64(s), x)
        n += big * s
    return n + (x > 0)


@dataclass(frozen=True)
class HardInstance:
    gamma: float
    levels: int
    j_max: int
    values: np.ndarray = field(repr=False)  # values[j-1] = w_j

    @property
    def probs(self) -> np.ndarray:
        """Truncated probabilities; the leftover tail mass sits on w_1."""
        p = 2.0 ** -np.arange(1, self.j_max + 1, dtype=float)
        p[0] += 2.0 ** -self.j_max
        return p

    @property
    def block_sizes(self) -> list:
        return [2 ** i for i in range(1, self.levels + 1)]

    @property
    def stopping_points(self) -> list:
        return [stopping_point(level) for level in range(1, self.levels + 1)]

    def sample_levels(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Index j of each draw (1-based) by inverting the dyadic CDF on a 64-bit word.

        A word with bit length 64 - k has probability 2^-(k+1), so
        j = 65 - bit_length is exact for j <= 64.  Draws beyond ``j_max``
        are folded onto j = 1.
        """
        raw = rng.bit_generator.random_raw(size)
        j = (SAMPLE_BITS + 1) - _bit_length(np.asarray(raw, dtype=np.uint64))
        return np.where(j > self.j_max, 1, j)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.values[self.sample_levels(rng, size) - 1]

    def expected_max(self, m: int) -> float:
        return expected_max_exact(self.gamma, m, self.j_max)


def hard_instance(gamma: float, levels: int, j_max: int | None = None) -> HardInstance:
    _check_gamma(gamma)
    if levels < 1:
        raise ValueError("levels must be at least 1")
    if j_max is None:
        j_max = min(default_j_max(gamma, stopping_point(levels)), SAMPLE_BITS)
    if not 1 <= j_max <= SAMPLE_BITS:
        raise ValueError(f"j_max must lie in 1..{SAMPLE_BITS}")
    values = 2.0 ** (gamma * np.arange(1, j_max + 1, dtype=float))
    return HardInstance(gamma, levels, j_max, values)


# -- single-choice policies on raw values ------------------------------------------

@dataclass(frozen=True)
class ScheduleRule:
    """Take record i with probability q_i; records are strict new maxima."""

    name: str
    q: np.ndarray = field(repr=False)

    def first_accept(self, V: np.ndarray, U: np.ndarray) -> np.ndarray:
        n = V.shape[1]
        q = np.zeros(n)
        k = min(n, len(self.q))
        q[:k] = self.q[:k]
        prev = np.maximum.accumulate(V, axis=1)
        record = np.empty(V.shape, dtype=bool)
        record[:, 0] = True
        record[:, 1:] = V[:, 1:] > prev[:, :-1]  # equal later draws count as smaller
        take = record & (U < q)
        return np.where(take.any(axis=1), take.argmax(axis=1), n)


@dataclass(frozen=True)
class ThresholdRule:
    """Take the first draw of value at least ``tau``."""

    name: str
    tau: float

    def first_accept(self, V: np.ndarray, U: np.ndarray) -> np.ndarray:
        take = V >= self.tau
        return np.where(take.any(axis=1), take.argmax(axis=1), V.shape[1])


SINGLE_CHOICE_POLICIES = ("harmonic", "one-over-e", "threshold")


def single_choice_policy(name: str, N: int, inst: HardInstance, threshold_level: int = 4):
    if name == "harmonic":
        # floats suffice here; q_i = 1/(H_{N-1} + 1 - H_{i-1})
        h = np.concatenate(([0.0], np.cumsum(1.0 / np.arange(1, N))))
        return ScheduleRule(f"harmonic(N={N})", 1.0 / (h[-1] + 1.0 - h))
    elif name == "one-over-e":
        s = one_over_e_policy(N)
    elif name == "threshold":
        if not 1 <= threshold_level <= inst.j_max:
            raise ValueError("threshold level outside the truncated support")
        return ThresholdRule(f"threshold(w_{threshold_level})", float(inst.values[threshold_level - 1]))
    else:
        raise ValueError(f"unknown single-choice policy {name!r}; choose from {', '.join(SINGLE_CHOICE_POLICIES)}")
    return ScheduleRule(f"{name}(N={N})", _float_schedule(s))


def _float_schedule(s: AcceptanceSchedule) -> np.ndarray:
    return np.array([float(x) for x in s.q])


# -- the sweep ------------------------------------------------------------------------

@dataclass
class HardnessReport:
    N: int
    gamma: float
    trials: int
    seed: int
    levels: list
    opt: list  # E[OPT_l] per level
    alg: dict  # policy name -> E[ALG_l] per level
    stderr: dict

    def ratios(self, name: str) -> list:
        return [o / a if a > 0 else math.inf for o, a in zip(self.opt, self.alg[name])]

    def worst(self, name: str):
        """(level, ratio) with the largest ratio; the earliest level wins ties."""
        r = self.ratios(name)
        i = max(range(len(r)), key=lambda k: (r[k], -k))
        return self.levels[i], r[i]

    def to_dict(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else "inf"

        out = {"N": self.N, "gamma": self.gamma, "trials": self.trials, "seed": self.seed,
               "levels": self.levels, "opt": self.opt, "policies": {}}
        for name in self.alg:
            level, ratio = self.worst(name)
            out["policies"][name] = {
                "alg": self.alg[name],
                "stderr": self.stderr[name],
                "ratios": [num(x) for x in self.ratios(name)],
                "worst_level": level,
                "worst_ratio": num(ratio),
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["policy", "level", "n", "opt", "alg", "stderr", "ratio"])
        for name in self.alg:
            for k, level in enumerate(self.levels):
                ratio = self.ratios(name)[k]
                w.writerow([name, level, stopping_point(level), repr(self.opt[k]), repr(self.alg[name][k]),
                            repr(self.stderr[name][k]), repr(ratio) if math.isfinite(ratio) else "inf"])
        return buf.getvalue()


def _trial_generators(seed: int, trial: int):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial),))
    vals, coins = ss.spawn(2)
    return np.random.default_rng(vals), np.random.default_rng(coins)


def hardness_sweep(policies, N: int, gamma: float | None = None, trials: int = 2000,
                   seed: int = 0, batch: int = 64, threshold_level: int = 4) -> HardnessReport:
    """Measure E[OPT_l] / E[ALG_l] at every stopping level l with n_l <= N.

    ``policies`` holds names from :data:`SINGLE_CHOICE_POLICIES` or rule
    objects.  Trial k draws its values and coins from generators seeded by
    ``(seed, k)`` alone, and longer streams extend shorter ones, so sweeps at
    different N share random numbers (common random numbers).
    """
    if gamma is None:
        gamma = gamma_for(N)
    top = max_level(N)
    if top < 1:
        raise ValueError("N must allow at least one full block (N >= 2)")
    inst = hard_instance(gamma, top)
    rules = [single_choice_policy(p, N, inst, threshold_level) if isinstance(p, str) else p for p in policies]
    levels = list(range(1, top + 1))
    cut = np.array([stopping_point(level) for level in levels])
    n = int(cut[-1])
    sums = {r.name: np.zeros(len(levels)) for r in rules}
    sq = {r.name: np.zeros(len(levels)) for r in rules}
    for lo in range(0, trials, batch):
        hi = min(trials, lo + batch)
        V = np.empty((hi - lo, n))
        U = np.empty((hi - lo, n))
        for row, k in enumerate(range(lo, hi)):
            gv, gc = _trial_generators(seed, k)
            V[row] = inst.sample(gv, n)
            U[row] = gc.random(n)
        for r in rules:
            first = r.first_accept(V, U)
            got = np.where(first < n, V[np.arange(len(first)), np.minimum(first, n - 1)], 0.0)
            # value at level l counts only if the pick happened before the stop
            per_level = np.where(first[:, None] < cut[None, :], got[:, None], 0.0)
            sums[r.name] += per_level.sum(axis=0)
            sq[r.name] += (per_level ** 2).sum(axis=0)
    alg, err = {}, {}
    for name in sums:
        mean = sums[name] / trials
        var = np.maximum(sq[name] / trials - mean ** 2, 0.0) * trials / max(trials - 1, 1)
        alg[name] = mean.tolist()
        err[name] = np.sqrt(var / trials).tolist()
    opt = [expected_max_exact(gamma, int(c)) for c in cut]
    return HardnessReport(N, gamma, trials, seed, levels, opt, alg, err)


def best_two_draw_ratio(gamma: float, j_max: int | None = None) -> float:
    """E[max of two draws] / best single-choice value on a stream of length two.

    Any single-choice rule on two draws is a threshold on the first draw;
    the best is found by trying every support point (plus never stopping).
    """
    _check_gamma(gamma)
    if j_max is None:
        j_max = default_j_max(gamma, 2)
    j = np.arange(1, j_max + 1, dtype=float)
    w = 2.0 ** (gamma * j)
    p = 2.0 ** -j
    p[0] += 2.0 ** -j_max
    mean = float(np.dot(w, p))
    best = mean  # never stop on the first draw: take the second
    for k in range(j_max):
        stop = w >= w[k]
        value = float(np.dot(w * p, stop)) + float(p[~stop].sum()) * mean
        best = max(best, value)
    cdf = np.cumsum(p)
    prev = np.concatenate(([0.0], cdf[:-1]))
    opt = float(np.dot(w, cdf ** 2 - prev ** 2))
    return opt / best
