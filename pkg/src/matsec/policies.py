"""Online matroid-secretary policies and the runner that feeds them.

A policy sees ``(element, weight)`` events in arrival order and answers
accept/reject immediately.  What it may ask about the matroid depends on its
information mode:

* ``MK`` - the whole matroid is known up front;
* ``MN`` - only the number of elements ``n``;
* ``MU`` - nothing; only elements that already arrived may be queried.

:func:`run_online` hands ``MN`` and ``MU`` policies an :class:`ArrivalGuard`
that raises :class:`UnseenElementError` on any query touching an element
that has not arrived yet, and checks after every acceptance that the
accepted set is still independent in the true matroid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import zeta

from .classical import AcceptanceSchedule, harmonic_policy, one_over_e_policy
from .coins import exact_expectation
from .matroid import Matroid, greedy_opt, set_weight
from .principal import is_uniformly_dense, principal_minors

__all__ = [
    "UnseenElementError",
    "IndependenceViolation",
    "ArrivalGuard",
    "OnlinePolicy",
    "RunResult",
    "run_online",
    "expected_value_exact",
    "SchedulePolicy",
    "UniformlyDenseThreshold",
    "PrincipalMinorsThreshold",
    "DynamicThreshold",
    "Alg3Trace",
    "BlockDoubling",
    "ThresholdPrice",
    "UnknownNReduction",
    "guess_probability",
    "guess_mass",
    "sample_guess",
    "TopWeightSets",
    "compute_claim_sets",
    "claim_probability_exact",
    "claim_probability_by_position",
    "alg1_uniformly_dense",
    "alg2_principal",
    "alg3_dynamic_threshold",
    "alg4_block_doubling",
    "threshold_price",
    "unknown_n_reduction",
    "make_policy",
    "POLICY_NAMES",
    "log2_floor1",
]


class UnseenElementError(LookupError):
    """A policy queried an element that has not arrived."""


class IndependenceViolation(AssertionError):
    """A policy accepted an element that breaks independence."""


def log2_floor1(r) -> float:
    """max(log2 r, 1): keeps log r factors positive at rank 1."""
    return max(math.log2(r), 1.0) if r > 0 else 1.0


def _scale(x, divisor):
    # exact division for ints and fractions, float division for floats
    if isinstance(x, float):
        return x / divisor
    return Fraction(x) / divisor


class ArrivalGuard:
    """Matroid view restricted to arrived elements."""

    def __init__(self, matroid: Matroid):
        self._m = matroid
        self.arrived = set()

    def arrive(self, e) -> None:
        self.arrived.add(e)

    def _guard(self, s) -> frozenset:
        s = frozenset(s)
        if not s <= self.arrived:
            raise UnseenElementError(f"query touches unseen elements {sorted(s - self.arrived)}")
        return s

    def rank(self, s) -> int:
        return self._m.rank(self._guard(s))

    def is_independent(self, s) -> bool:
        return self._m.is_independent(self._guard(s))

    def is_loop(self, e) -> bool:
        self._guard((e,))
        return self._m.is_loop(e)

    def span(self, s) -> frozenset:
        s = self._guard(s)
        base = self._m.rank(s)
        return frozenset(e for e in self.arrived if self._m.rank(s | {e}) == base)

    def tracker(self):
        return _GuardedTracker(self, self._m.tracker())


class _GuardedTracker:
    def __init__(self, guard: ArrivalGuard, inner):
        self.guard = guard
        self.inner = inner

    @property
    def members(self):
        return self.inner.members

    def can_add(self, e):
        self.guard._guard((e,))
        return self.inner.can_add(e)

    def add(self, e):
        self.guard._guard((e,))
        self.inner.add(e)

    def try_add(self, e):
        if self.can_add(e):
            self.inner.add(e)
            return True
        return False


class OnlinePolicy:
    """Base class.  ``start`` resets per-run state; ``offer`` decides one event."""

    mode = "MU"

    def start(self, oracle, n, coins) -> None:
        raise NotImplementedError

    def offer(self, e, w) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class RunResult:
    accepted: tuple
    value: object


def run_online(policy: OnlinePolicy, matroid: Matroid, order, weights, coins=None) -> RunResult:
    """Feed ``order`` to ``policy``; ``weights[e]`` is element e's weight."""
    order = list(order)
    if len(order) != matroid.n or set(order) != matroid.ground:
        raise ValueError("order must be a permutation of the ground set")
    if policy.mode == "MK":
        guard = None
        policy.start(matroid, len(order), coins)
    else:
        guard = ArrivalGuard(matroid)
        policy.start(guard, len(order) if policy.mode == "MN" else None, coins)
    check = matroid.tracker()
    accepted = []
    for e in order:
        if guard is not None:
            guard.arrived.add(e)
        if policy.offer(e, weights[e]):
            if not check.can_add(e):
                raise IndependenceViolation(
                    f"{type(policy).__name__} accepted {e}, breaking independence of {sorted(accepted)}")
            check.add(e)
            accepted.append(e)
    return RunResult(tuple(accepted), set_weight(accepted, weights))


def expected_value_exact(policy: OnlinePolicy, matroid, order, weights):
    """Expected accepted weight over all of the policy's coin outcomes."""
    return exact_expectation(lambda coins: run_online(policy, matroid, order, weights, coins).value)


# -- classical single-choice policy ------------------------------------------

class SchedulePolicy(OnlinePolicy):
    """Take the i-th non-loop candidate w.p. q_i when it is best so far.

    Ties count as not beating the earlier element.  ``schedule`` is an
    :class:`AcceptanceSchedule` or any object with ``length`` and ``prob(i)``
    (1-based), which lets huge schedules be computed lazily.
    """

    mode = "MU"

    def __init__(self, schedule):
        self.schedule = schedule
        if isinstance(schedule, AcceptanceSchedule):
            self.length = len(schedule.q)
            self.prob = lambda i: schedule.q[i - 1]
        else:
            self.length = schedule.length
            self.prob = schedule.prob

    def start(self, oracle, n, coins):
        self.oracle = oracle
        self.coins = coins
        self.i = 0
        self.best = None
        self.done = False

    def offer(self, e, w):
        if self.done or self.oracle.is_loop(e):
            return False
        self.i += 1
        if self.best is not None and w <= self.best:
            return False
        self.best = w
        if self.i > self.length:
            return False
        q = self.prob(self.i)
        # 0/1 entries need no coin, so deterministic schedules run without one
        if q >= 1 or (q > 0 and self.coins.bernoulli(q)):
            self.done = True
            return True
        return False


EXACT_SCHEDULE_LIMIT = 4096
_EULER_GAMMA = 0.5772156649015329


def _harmonic_float(m: int) -> float:
    if m < 10**6:
        return math.fsum(1 / k for k in range(1, m + 1))
    # asymptotic expansion; math.log accepts arbitrarily large ints
    return math.log(m) + _EULER_GAMMA + 1 / (2 * m) - 1 / (12 * m * m)


class LazyHarmonic:
    """q_i = 1/(H_{N-1} + 1 - H_{i-1}) in floating point, for N too large to tabulate."""

    def __init__(self, N: int):
        self.length = N
        self.top = _harmonic_float(N - 1) + 1
        self._h = [0.0]  # running H_{i-1}; arrivals only ever ask for i in order

    def prob(self, i: int) -> float:
        while len(self._h) < i:
            self._h.append(self._h[-1] + 1 / len(self._h))
        return 1 / (self.top - self._h[i - 1])


class LazyOneOverE:
    """Skip floor(n/e) candidates, then take the first record."""

    def __init__(self, n: int):
        self.length = n
        # floor(n/e) exactly for moderate n; past 2^52 no stream reaches the cutoff
        self.skip = math.floor(n / math.e) if n < 2**52 else n

    def prob(self, i: int) -> int:
        return 0 if i <= self.skip else 1


def harmonic_schedule_policy(N: int) -> SchedulePolicy:
    return SchedulePolicy(harmonic_policy(N) if N <= EXACT_SCHEDULE_LIMIT else LazyHarmonic(N))


def one_over_e_schedule_policy(n: int) -> SchedulePolicy:
    return SchedulePolicy(one_over_e_policy(n) if n <= EXACT_SCHEDULE_LIMIT else LazyOneOverE(n))


# -- uniformly dense matroids (known matroid, random assignment) -------------

SMALL_RANK = 12


class UniformlyDenseThreshold(OnlinePolicy):
    """Sample half the input, then greedily take weights above a fixed threshold.

    Rank below 12 falls back to the classical 1/e rule.  Otherwise the
    threshold is the (floor(r/4)+1)-th largest weight among the first
    ceil(n/2) arrivals; a sample with fewer weights than that accepts nothing.
    """

    mode = "MK"

    def __init__(self, matroid: Matroid, check: bool = True):
        if check:
            if matroid.loops():
                raise ValueError("matroid has loops")
            if not is_uniformly_dense(matroid):
                raise ValueError("matroid is not uniformly dense")
        self.matroid = matroid
        self.r = matroid.rank()
        self.n = matroid.n

    def start(self, oracle, n, coins):
        self.seen = 0
        self.half = (self.n + 1) // 2
        self.sample = []
        self.threshold = None
        self.inner = None
        if self.r < SMALL_RANK:
            self.inner = SchedulePolicy(one_over_e_policy(max(self.n, 1)))
            self.inner.start(self.matroid, self.n, coins)
        else:
            self.tracker = self.matroid.tracker()

    def offer(self, e, w):
        if self.inner is not None:
            return self.inner.offer(e, w)
        self.seen += 1
        if self.seen <= self.half:
            self.sample.append(w)
            if self.seen == self.half:
                k = self.r // 4 + 1
                self.threshold = (sorted(self.sample, reverse=True)[k - 1]
                                  if len(self.sample) >= k else math.inf)
            return False
        if w > self.threshold and self.tracker.can_add(e):
            self.tracker.add(e)
            return True
        return False


class PrincipalMinorsThreshold(OnlinePolicy):
    """Run :class:`UniformlyDenseThreshold` separately on every principal minor."""

    mode = "MK"

    def __init__(self, matroid: Matroid, decomposition=None):
        self.decomposition = decomposition or principal_minors(matroid)
        self.owner = self.decomposition.owner()
        self.subs = [UniformlyDenseThreshold(p.matroid, check=False)
                     for p in self.decomposition.minors]

    def start(self, oracle, n, coins):
        for sub in self.subs:
            sub.start(sub.matroid, sub.n, coins)

    def offer(self, e, w):
        i = self.owner.get(e)
        if i is None:
            return False
        return self.subs[i].offer(e, w)


# -- unknown matroid with a bound on the top weight --------------------------

@dataclass
class Alg3Trace:
    e1: bool = False
    r_star: list = field(default_factory=list)
    w_star: list = field(default_factory=list)
    doubling_times: list = field(default_factory=list)
    resets: list = field(default_factory=list)

    @property
    def final_r_star(self):
        return self.r_star[-1] if self.r_star else 2

    @property
    def final_w_star(self):
        return self.w_star[-1] if self.w_star else None


class DynamicThreshold(OnlinePolicy):
    """Threshold that drops as the rank of the arrived prefix doubles.

    With probability 1/2 take the first non-loop above ``L`` and stop.
    Otherwise start at ``L/2`` and, each time the arrived rank reaches
    ``r*``, move the threshold to ``L/(2 r*)`` with probability
    ``1/log2(2 r*)`` and double ``r*``.
    """

    mode = "MU"

    def __init__(self, L, _allow_zero: bool = False):
        if L < 0 or (L == 0 and not _allow_zero):
            raise ValueError("the bound L must be positive")
        self.L = L

    def start(self, oracle, n, coins):
        self.oracle = oracle
        self.coins = coins
        self.trace = Alg3Trace(e1=coins.bernoulli(Fraction(1, 2)))
        self.done = False
        self.tracker = oracle.tracker()
        self.prefix = oracle.tracker()
        self.rank_seen = 0
        self.r_star = 2
        self.w_star = _scale(self.L, 2)
        self.t = 0

    def offer(self, e, w):
        self.t += 1
        if self.trace.e1:
            if self.done or w <= self.L or self.oracle.is_loop(e):
                return False
            self.done = True
            return True
        take = w > self.w_star and self.tracker.can_add(e)
        if take:
            self.tracker.add(e)
        if self.prefix.try_add(e):
            self.rank_seen += 1
        if self.rank_seen >= self.r_star:
            if self.coins.bernoulli(Fraction(1, int(math.log2(2 * self.r_star)))):
                self.w_star = _scale(self.L, 2 * self.r_star)
                self.trace.resets.append(self.t)
            self.r_star *= 2
            self.trace.doubling_times.append(self.t)
        self.trace.r_star.append(self.r_star)
        self.trace.w_star.append(self.w_star)
        return take


class BlockDoubling(OnlinePolicy):
    """Pick a block size 2^b at random, learn L from the 2^b - 1 earlier non-loops.

    ``b`` is uniform on ``0..floor(log2 n)``.  Loops are ignored throughout.
    With ``b = 0`` nothing precedes the block, so its single non-loop is
    taken outright.
    """

    mode = "MN"

    def start(self, oracle, n, coins):
        self.oracle = oracle
        self.coins = coins
        n = max(n or 1, 1)
        self.b = coins.integers(n.bit_length())
        self.skip = 2 ** self.b - 1
        self.block = 2 ** self.b
        self.count = 0
        self.L = None
        self.sub = None

    def offer(self, e, w):
        if self.count >= self.skip + self.block or self.oracle.is_loop(e):
            return False
        self.count += 1
        if self.count <= self.skip:
            self.L = w if self.L is None else max(self.L, w)
            return False
        if self.b == 0:
            return True
        if self.sub is None:
            self.sub = DynamicThreshold(self.L, _allow_zero=True)
            self.sub.start(self.oracle, self.block, self.coins)
        return self.sub.offer(e, w)


class ThresholdPrice(OnlinePolicy):
    """Known-n baseline: sample half, threshold at max / 2^j with random j.

    ``j`` is uniform on ``0..ceil(log2 r_seen)`` where ``r_seen`` is the rank
    of the sample (at least 1).  The max is taken over non-loop samples.
    ``n`` may be fixed at construction; otherwise the runner supplies it.
    """

    mode = "MN"

    def __init__(self, n: int | None = None):
        self.n_fixed = n

    def start(self, oracle, n, coins):
        self.oracle = oracle
        self.coins = coins
        self.n = self.n_fixed if self.n_fixed is not None else n
        self.half = (self.n + 1) // 2
        self.seen = 0
        self.w_max = None
        self.prefix = oracle.tracker()
        self.r_seen = 0
        self.threshold = None
        self.tracker = oracle.tracker()

    def _set_threshold(self):
        levels = (max(self.r_seen, 1) - 1).bit_length()  # ceil(log2 r)
        self.j = self.coins.integers(levels + 1)
        top = self.w_max if self.w_max is not None else 0
        self.threshold = _scale(top, 2 ** self.j)

    def offer(self, e, w):
        self.seen += 1
        if self.seen > self.n:
            return False
        if self.seen <= self.half:
            if self.prefix.try_add(e):
                self.r_seen += 1
            if not self.oracle.is_loop(e):
                self.w_max = w if self.w_max is None else max(self.w_max, w)
            if self.seen == self.half:
                self._set_threshold()
            return False
        if w > self.threshold and self.tracker.can_add(e):
            self.tracker.add(e)
            return True
        return False


# -- unknown n: guess n' = 2^i with a polynomial tail -------------------------

MAX_GUESS_EXPONENT = 4096


def guess_probability(i: int, eps: float) -> float:
    """p_i = eps/(1+eps) * (1+i)^-(1+eps)."""
    return eps / (1 + eps) / (1 + i) ** (1 + eps)


def guess_mass(eps: float) -> float:
    """sum_{i>=0} p_i = eps/(1+eps) * zeta(1+eps)."""
    return eps / (1 + eps) * float(zeta(1 + eps))


def _guess_cdf(i: int, eps: float) -> float:
    # sum_{k<=i} p_k via the Hurwitz zeta tail
    s = 1 + eps
    return eps / (1 + eps) * float(zeta(s) - zeta(s, i + 2))


@lru_cache(maxsize=32)
def _guess_table(eps: float, cap: int) -> np.ndarray:
    # cdf[i] = sum_{k<=i} p_k for i = 0..cap
    i = np.arange(cap + 1, dtype=float)
    return np.cumsum(eps / (1 + eps) / (1 + i) ** (1 + eps))


def sample_guess(u: float, eps: float, cap: int | None = None):
    """Inverse CDF: the i with P(guess <= i-1) <= u < P(guess <= i), or None.

    With ``cap`` set, any guess above ``cap`` is reported as ``cap + 1``
    without locating it exactly.
    """
    if cap is not None:
        table = _guess_table(eps, cap)
        if u < table[-1]:
            return int(np.searchsorted(table, u, side="right"))
        return cap + 1 if u < guess_mass(eps) else None
    if u >= guess_mass(eps):
        return None
    hi = 1
    while _guess_cdf(hi, eps) <= u:
        hi *= 2
        if hi > 2 ** 62:
            return None
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if _guess_cdf(mid, eps) > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


class UnknownNReduction(OnlinePolicy):
    """Guess n' = 2^i and run a known-n policy on the first n' arrivals."""

    mode = "MU"

    def __init__(self, eps: float, base_factory):
        if not 0 < eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        self.eps = eps
        self.base_factory = base_factory

    def start(self, oracle, n, coins):
        self.i = sample_guess(coins.random(), self.eps, cap=MAX_GUESS_EXPONENT)
        self.count = 0
        self.base = None
        # past 2^4096 arrivals the guess is indistinguishable from "never"
        if self.i is not None and self.i <= MAX_GUESS_EXPONENT:
            self.limit = 2 ** self.i
            self.base = self.base_factory(self.limit)
            self.base.start(oracle, self.limit, coins)

    def offer(self, e, w):
        self.count += 1
        if self.base is None or self.count > self.limit:
            return False
        return self.base.offer(e, w)


# -- verification helpers for the top-weight argument -------------------------

@dataclass(frozen=True)
class TopWeightSets:
    i: int
    t: int
    C: frozenset
    A: frozenset
    B: frozenset


def compute_claim_sets(m: Matroid, order, weights, i: int) -> TopWeightSets:
    """Top-t elements other than the i-th heaviest, split by input half.

    ``t = 2 floor(r/4) + 2``; ``i`` is 1-based and at most floor(r/4).
    """
    order = list(order)
    n = len(order)
    r = m.rank()
    k = r // 4
    if n % 2:
        raise ValueError("the half split needs an even number of elements")
    if r < SMALL_RANK:
        raise ValueError("needs rank at least 12")
    if not 1 <= i <= k:
        raise ValueError(f"i must lie in 1..{k}")
    t = 2 * k + 2
    by_weight = sorted(order, key=lambda e: -weights[e])
    top = by_weight[:t]
    C = frozenset(top) - {by_weight[i - 1]}
    first_half = frozenset(order[: n // 2])
    return TopWeightSets(i, t, C, C & first_half, C - first_half)


def _hypergeometric_at_most(k, size_a, size_b, draws):
    # P(at most k of `draws` uniform picks land in the B side)
    total = math.comb(size_a + size_b, draws)
    hits = sum(math.comb(size_b, j) * math.comb(size_a, draws - j) for j in range(0, k + 1))
    return Fraction(hits, total)


def claim_probability_exact(n: int, r: int) -> Fraction:
    """P(|B'_i| <= floor(r/4)) with C'_i a uniform (t-1)-subset of n elements."""
    if n % 2:
        raise ValueError("n must be even")
    k = r // 4
    return _hypergeometric_at_most(k, n // 2, n // 2, 2 * k + 1)


def claim_probability_by_position(n: int, r: int, i: int) -> Fraction:
    """Same probability, conditioning on which half receives weight w_i.

    Given that side, the other top-t weights occupy a uniform (t-1)-subset
    of the remaining n-1 elements.  ``i`` only fixes which weight is held out.
    """
    if n % 2:
        raise ValueError("n must be even")
    k = r // 4
    if not 1 <= i <= k:
        raise ValueError(f"i must lie in 1..{k}")
    h = n // 2
    in_a = _hypergeometric_at_most(k, h - 1, h, 2 * k + 1)
    in_b = _hypergeometric_at_most(k, h, h - 1, 2 * k + 1)
    return Fraction(1, 2) * in_a + Fraction(1, 2) * in_b


# -- functional entry points ---------------------------------------------------

def alg1_uniformly_dense(m, order, weights, coins=None) -> frozenset:
    return frozenset(run_online(UniformlyDenseThreshold(m), m, order, weights, coins).accepted)


def alg2_principal(m, order, weights, coins=None) -> frozenset:
    return frozenset(run_online(PrincipalMinorsThreshold(m), m, order, weights, coins).accepted)


def alg3_dynamic_threshold(L, m, order, weights, coins) -> frozenset:
    return frozenset(run_online(DynamicThreshold(L), m, order, weights, coins).accepted)


def alg4_block_doubling(m, order, weights, coins) -> frozenset:
    return frozenset(run_online(BlockDoubling(), m, order, weights, coins).accepted)


def threshold_price(m, order, weights, coins) -> frozenset:
    return frozenset(run_online(ThresholdPrice(), m, order, weights, coins).accepted)


def unknown_n_reduction(eps, base_factory, m, order, weights, coins) -> frozenset:
    return frozenset(run_online(UnknownNReduction(eps, base_factory), m, order, weights, coins).accepted)


# -- registry used by the harness and the CLI --------------------------------

def _base_factory(name: str):
    if name == "threshold-price":
        return lambda n: ThresholdPrice(n)
    if name == "one-over-e":
        return one_over_e_schedule_policy
    if name == "harmonic":
        return harmonic_schedule_policy
    raise ValueError(f"unknown base policy {name!r}")


POLICY_NAMES = ("alg1", "alg2", "alg3", "alg4", "threshold-price",
                "unknown-n-reduction", "harmonic", "one-over-e")


def make_policy(name: str, matroid: Matroid | None = None, **params) -> OnlinePolicy:
    if name == "alg1":
        return UniformlyDenseThreshold(matroid, check=params.get("check", True))
    if name == "alg2":
        return PrincipalMinorsThreshold(matroid)
    if name == "alg3":
        if "L" not in params:
            raise ValueError("alg3 requires the bound L")
        return DynamicThreshold(params["L"])
    if name == "alg4":
        return BlockDoubling()
    if name == "threshold-price":
        return ThresholdPrice(params.get("n"))
    if name == "unknown-n-reduction":
        if "eps" not in params or "base" not in params:
            raise ValueError("unknown-n-reduction requires eps and base")
        return UnknownNReduction(float(params["eps"]), _base_factory(params["base"]))
    if name == "harmonic":
        return SchedulePolicy(harmonic_policy(int(params["N"])))
    if name == "one-over-e":
        return SchedulePolicy(one_over_e_policy(int(params["n"])))
    raise ValueError(f"unknown policy {name!r}; choose from {', '.join(POLICY_NAMES)}")


def offline_opt_value(m: Matroid, weights):
    return set_weight(greedy_opt(m, weights), weights)
