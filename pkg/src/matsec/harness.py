"""Experiment harness: weight and order models, exact and Monte Carlo runs.

An experiment is described by a JSON-compatible :class:`ExperimentConfig`.
Monte Carlo trial ``k`` draws everything (weights, order, policy coins) from
a generator seeded with ``trial_seed(seed, k)``, so any subset of trials can
be recomputed in isolation and shards merge into the sequential result.
Exhaustive runs average exactly over all orders and/or all weight
bijections, and over every coin outcome of the policy.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .coins import ContinuousDraw, NumpyCoins, enumerate_outcomes, trial_seed
from .matroid import Matroid, greedy_opt, load_matroid, matroid_from_dict, set_weight
from .policies import DynamicThreshold, make_policy, run_online

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "TrialRecord",
    "Report",
    "HEURISTICS",
    "heuristic_order",
    "run_experiment",
    "run_sharded",
    "worstcase_order_search",
]

EXHAUSTIVE_ORDER_LIMIT = 7
EXHAUSTIVE_ASSIGNMENT_LIMIT = 8
HEURISTICS = ("identity", "reverse", "loops-first", "loops-last", "alternating",
              "forest-first", "forest-last", "descending-weight", "ascending-weight")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    matroid: object  # inline dict or path to a matroid JSON file
    policy: dict
    weights: dict = field(default_factory=lambda: {"model": "explicit"})
    assignment: object = "random"
    order: dict = field(default_factory=lambda: {"model": "uniform"})
    trials: int = 1000
    seed: int = 0
    mode: str | None = None
    metric: str = "weight"
    bound: dict | None = None
    exact: bool = False  # average over every coin outcome instead of sampling

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "matroid" not in d or "policy" not in d:
            raise ConfigError("config needs 'matroid' and 'policy'")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def build_matroid(self) -> Matroid:
        if isinstance(self.matroid, (str, Path)):
            return load_matroid(self.matroid)
        return matroid_from_dict(self.matroid)

    @property
    def exhaustive(self) -> bool:
        return self.order.get("model") == "exhaustive" or self.assignment == "all" or self.exact

    def validate(self, m: Matroid | None = None) -> None:
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if self.metric not in ("weight", "success"):
            raise ConfigError("metric must be 'weight' or 'success'")
        if self.mode not in (None, "MK", "MN", "MU"):
            raise ConfigError("mode must be MK, MN or MU")
        if "name" not in self.policy:
            raise ConfigError("policy needs a 'name'")
        wm = self.weights.get("model")
        if wm == "explicit":
            values = self.weights.get("values")
            if values is not None and any(values[i] <= values[i + 1] for i in range(len(values) - 1)):
                raise ConfigError("explicit weights must be strictly decreasing")
            if values is not None and any(v < 0 for v in values):
                raise ConfigError("weights must be nonnegative")
        elif wm == "hard":
            g = self.weights.get("gamma")
            if g is None or not 0 < g < 1 / 3:
                raise ConfigError("hard weights need 0 < gamma < 1/3")
            if self.exhaustive:
                raise ConfigError("exhaustive runs need explicit weights")
        else:
            raise ConfigError(f"unknown weight model {wm!r}")
        om = self.order.get("model")
        if om not in ("uniform", "fixed", "exhaustive", "heuristic"):
            raise ConfigError(f"unknown order model {om!r}")
        if om == "heuristic" and self.order.get("name") not in HEURISTICS:
            raise ConfigError(f"heuristic must be one of {', '.join(HEURISTICS)}")
        if not (self.assignment in ("random", "identity", "all") or isinstance(self.assignment, list)):
            raise ConfigError("assignment must be random, identity, all or an index list")
        if self.exact and (om == "uniform" or self.assignment == "random"):
            raise ConfigError("exact runs need a deterministic order model and assignment")
        if self.bound is not None and self.bound.get("kind") not in ("opt_fraction", "top_r_fraction", "absolute"):
            raise ConfigError("bound kind must be opt_fraction, top_r_fraction or absolute")
        if m is None:
            return
        n = m.n
        if wm == "explicit":
            values = self.weights.get("values")
            if values is not None and len(values) != n:
                raise ConfigError(f"need {n} explicit weights, got {len(values)}")
        if om == "exhaustive" and n > EXHAUSTIVE_ORDER_LIMIT:
            raise ConfigError(f"exhaustive order search needs n <= {EXHAUSTIVE_ORDER_LIMIT} (n = {n})")
        if self.assignment == "all" and n > EXHAUSTIVE_ASSIGNMENT_LIMIT:
            raise ConfigError(f"exhaustive assignments need n <= {EXHAUSTIVE_ASSIGNMENT_LIMIT} (n = {n})")
        if om == "fixed":
            perm = self.order.get("permutation")
            if perm is None or sorted(perm) != sorted(m.ground):
                raise ConfigError("fixed order must be a permutation of the ground set")
        if isinstance(self.assignment, list) and sorted(self.assignment) != list(range(n)):
            raise ConfigError("assignment list must be a permutation of 0..n-1")
        required = {"alg1": "MK", "alg2": "MK", "threshold-price": "MN", "alg4": "MN"}
        need = required.get(self.policy["name"], "MU")
        rank = {"MU": 0, "MN": 1, "MK": 2}
        if self.mode is not None and rank[self.mode] < rank[need]:
            raise ConfigError(f"policy {self.policy['name']} needs mode {need}, config gives {self.mode}")


# -- order models -------------------------------------------------------------

def heuristic_order(name: str, m: Matroid, weights=None) -> list:
    """Static adversarial orders that do not look at the policy's coins."""
    ids = sorted(m.ground)
    if name == "identity":
        return ids
    if name == "reverse":
        return ids[::-1]
    if name in ("loops-first", "loops-last"):
        loops = m.loops()
        head = [e for e in ids if e in loops]
        tail = [e for e in ids if e not in loops]
        return head + tail if name == "loops-first" else tail + head
    if name == "alternating":
        out, lo, hi = [], 0, len(ids) - 1
        while lo <= hi:
            out.append(ids[lo])
            if lo != hi:
                out.append(ids[hi])
            lo, hi = lo + 1, hi - 1
        return out
    if name in ("forest-first", "forest-last"):
        t = m.tracker()
        for e in ids:
            t.try_add(e)
        basis = [e for e in ids if e in t.members]
        rest = [e for e in ids if e not in t.members]
        return basis + rest if name == "forest-first" else rest + basis
    if name in ("descending-weight", "ascending-weight"):
        if weights is None:
            raise ValueError(f"{name} needs weights")
        key = (lambda e: (-weights[e], e)) if name == "descending-weight" else (lambda e: (weights[e], e))
        return sorted(ids, key=key)
    raise ValueError(f"unknown heuristic {name!r}")


# -- hard i.i.d. weights --------------------------------------------------------

def _hard_sampler(cfg: ExperimentConfig, n: int):
    from .hardness import SAMPLE_BITS, default_j_max, hard_instance
    g = cfg.weights["gamma"]
    j_max = cfg.weights.get("j_max") or min(default_j_max(g, max(n, 1)), SAMPLE_BITS)
    return hard_instance(g, levels=1, j_max=j_max)


def _strict_from_iid(values, order):
    """Tie-break equal draws by arrival: earlier arrivals count as larger."""
    n = len(values)
    eff = list(values)
    for pos, e in enumerate(order):
        eff[e] = values[e] - pos * 1e-12 * max(1.0, abs(values[e]))
    assert len(eff) == n
    return eff


# -- reports --------------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    trial: int
    value: object
    opt: object
    seed: int | None = None
    prob: Fraction | None = None  # exhaustive runs: probability mass of this record
    accepted_ranks: tuple = ()


def _to_json_number(x):
    if isinstance(x, Fraction):
        return float(x)
    return x


def _exact_str(x):
    return f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else None


@dataclass
class Report:
    config: dict
    records: list
    exact: bool = False
    bound_target: object = None  # precomputed for top_r_fraction / absolute bounds
    sigmas: float = 3.0

    def sorted_records(self):
        return sorted(self.records, key=lambda r: r.trial)

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def mean(self):
        recs = self.sorted_records()
        if self.exact:
            return sum((r.prob * r.value for r in recs), Fraction(0))
        return math.fsum(float(r.value) for r in recs) / len(recs)

    @property
    def mean_opt(self):
        recs = self.sorted_records()
        if self.exact:
            return sum((r.prob * r.opt for r in recs), Fraction(0))
        return math.fsum(float(r.opt) for r in recs) / len(recs)

    @property
    def stderr(self) -> float:
        if self.exact or len(self.records) < 2:
            return 0.0
        vals = np.array([float(r.value) for r in self.sorted_records()])
        return float(vals.std(ddof=1) / math.sqrt(len(vals)))

    @property
    def ratio(self):
        mean = self.mean
        if mean == 0:
            return math.inf
        return self.mean_opt / mean

    def acceptance_frequency(self, rank: int) -> float:
        """Fraction of trials that accepted the element holding the rank-th largest weight (0-based)."""
        if self.exact:
            return float(sum((r.prob for r in self.records if rank in r.accepted_ranks), Fraction(0)))
        return sum(rank in r.accepted_ranks for r in self.records) / len(self.records)

    @property
    def bound(self):
        b = self.config.get("bound")
        if b is None:
            return None
        if b["kind"] == "opt_fraction":
            return Fraction(b["factor"]) * self.mean_opt if self.exact else float(b["factor"]) * self.mean_opt
        return self.bound_target

    @property
    def passed(self):
        target = self.bound
        if target is None:
            return None
        slack = self.sigmas * self.stderr
        return bool(self.mean + slack >= target) if not self.exact else bool(self.mean >= target)

    def merge(self, other: "Report") -> "Report":
        if self.config != other.config or self.exact != other.exact:
            raise ValueError("can only merge reports of the same experiment")
        seen = {r.trial for r in self.records}
        if any(r.trial in seen for r in other.records):
            raise ValueError("reports share trial indices")
        return Report(self.config, self.sorted_records() + other.records, self.exact,
                      self.bound_target, self.sigmas)

    def to_dict(self) -> dict:
        b = self.config.get("bound")
        return {
            "config_echo": self.config,
            "trials": self.trials,
            "exact": self.exact,
            "mean": _to_json_number(self.mean),
            "mean_exact": _exact_str(self.mean),
            "stderr": self.stderr,
            "mean_opt": _to_json_number(self.mean_opt),
            "mean_opt_exact": _exact_str(self.mean_opt),
            "ratio": _to_json_number(self.ratio) if self.ratio != math.inf else None,
            "bound": _to_json_number(self.bound),
            "bound_source": None if b is None else b.get("source", b["kind"]),
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "policy", "value", "opt", "ratio", "seed"])
        name = self.config["policy"]["name"]
        for r in self.sorted_records():
            v, o = float(r.value), float(r.opt)
            ratio = o / v if v else ""
            w.writerow([r.trial, name, repr(v), repr(o), repr(ratio) if ratio != "" else "", r.seed if r.seed is not None else ""])
        return buf.getvalue()


# -- running ------------------------------------------------------------------------

class _Runner:
    """Builds the matroid and policy once; evaluates trials or fixed orders."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.m = cfg.build_matroid()
        cfg.validate(self.m)
        self.n = self.m.n
        params = {k: v for k, v in cfg.policy.items() if k != "name"}
        self.midpoint_L = params.get("L") == "midpoint"
        if self.midpoint_L:
            self.policy = None
        else:
            if cfg.policy["name"] == "alg3":
                params["L"] = Fraction(params["L"]) if not isinstance(params["L"], float) else params["L"]
            self.policy = make_policy(cfg.policy["name"], self.m, **params)
        if cfg.weights["model"] == "explicit":
            values = cfg.weights.get("values")
            if values is None:
                values = list(range(self.n, 0, -1))
            self.W = [Fraction(v) if cfg.exhaustive else v for v in values]
            self.hard = None
        else:
            self.W = None
            self.hard = _hard_sampler(cfg, self.n)

    def bound_target(self):
        b = self.cfg.bound
        if b is None or b["kind"] == "opt_fraction":
            return None
        if b["kind"] == "absolute":
            return b["value"]
        if self.W is None:
            raise ConfigError("top_r_fraction bounds need explicit weights")
        r = self.m.rank()
        top = sum(self.W[:r])
        return Fraction(b["factor"]) * top if self.cfg.exhaustive else float(b["factor"]) * float(top)

    def policy_for(self, weights):
        if not self.midpoint_L:
            return self.policy
        return DynamicThreshold(midpoint_bound(self.m, weights))

    def element_weights(self, assignment):
        return [self.W[assignment[e]] for e in range(self.n)]

    def score(self, accepted, weights):
        if self.cfg.metric == "success":
            best = max(self.m.ground, key=lambda e: (weights[e], -e))
            return int(len(accepted) == 1 and accepted[0] == best)
        return set_weight(accepted, weights)

    def opt_value(self, weights):
        if self.cfg.metric == "success":
            return 1
        return set_weight(greedy_opt(self.m, weights), weights)

    def order_for(self, rng, weights):
        om = self.cfg.order
        if om["model"] == "uniform":
            return [int(e) for e in rng.permutation(sorted(self.m.ground))]
        if om["model"] == "fixed":
            return list(om["permutation"])
        return heuristic_order(om["name"], self.m, weights)

    def mc_trial(self, k: int) -> TrialRecord:
        seed = trial_seed(self.cfg.seed, k)
        rng = np.random.default_rng(seed)
        if self.hard is not None:
            raw = [float(v) for v in self.hard.sample(rng, self.n)]
            order = self.order_for(rng, raw)
            eff = _strict_from_iid(raw, order)
            ranks_of = None
        else:
            a = self.cfg.assignment
            if a == "random":
                assignment = [int(i) for i in rng.permutation(self.n)]
            elif a == "identity":
                assignment = list(range(self.n))
            else:
                assignment = list(a)
            raw = eff = self.element_weights(assignment)
            order = self.order_for(rng, raw)
            ranks_of = assignment
        policy = self.policy_for(eff)
        res = run_online(policy, self.m, order, eff, NumpyCoins(rng))
        value = self.score(res.accepted, raw)
        opt = self.opt_value(eff) if self.hard is None else set_weight(greedy_opt(self.m, eff), raw)
        ranks = tuple(sorted(ranks_of[e] for e in res.accepted)) if ranks_of else ()
        return TrialRecord(k, value, opt, seed, None, ranks)

    def exhaustive_records(self):
        orders = (list(p) for p in itertools.permutations(sorted(self.m.ground))) \
            if self.cfg.order["model"] == "exhaustive" else None
        a = self.cfg.assignment
        if a == "all":
            assignments = [list(p) for p in itertools.permutations(range(self.n))]
        elif a == "identity":
            assignments = [list(range(self.n))]
        elif isinstance(a, list):
            assignments = [list(a)]
        else:
            raise ConfigError("exhaustive orders need a fixed, identity or 'all' assignment")
        order_list = list(orders) if orders is not None else [None]
        total = len(order_list) * len(assignments)
        prob = Fraction(1, total)
        records = []
        k = 0
        for order in order_list:
            for assignment in assignments:
                weights = self.element_weights(assignment)
                o = order if order is not None else self.order_for(None, weights)
                policy = self.policy_for(weights)
                rank_probs = {}

                def run(coins, o=o, weights=weights, policy=policy):
                    return run_online(policy, self.m, o, weights, coins).accepted

                value = Fraction(0)
                try:
                    outcomes = list(enumerate_outcomes(run))
                except ContinuousDraw as exc:
                    raise ConfigError(f"{self.cfg.policy['name']} draws continuous randomness; "
                                      "use a Monte Carlo run") from exc
                for p, acc in outcomes:
                    value += p * self.score(list(acc), weights)
                    for e in acc:
                        rank_probs[assignment[e]] = rank_probs.get(assignment[e], 0) + p
                opt = Fraction(self.opt_value(weights))
                # accepted_ranks keeps ranks accepted with probability one
                sure = tuple(sorted(r for r, p in rank_probs.items() if p == 1))
                records.append(TrialRecord(k, value, opt, None, prob, sure))
                k += 1
        return records


def midpoint_bound(m: Matroid, weights):
    """A valid bound strictly between the top two non-loop weights."""
    loops = m.loops()
    top = sorted((weights[e] for e in m.ground if e not in loops), reverse=True)
    if not top:
        return 1
    if len(top) == 1:
        return top[0] / 2 if isinstance(top[0], float) else Fraction(top[0]) / 2
    a, b = top[0], top[1]
    return (a + b) / 2 if isinstance(a, float) else (Fraction(a) + Fraction(b)) / 2


def run_experiment(cfg, trials=None) -> Report:
    """Run an experiment; ``trials`` restricts Monte Carlo runs to a trial range."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    runner = _Runner(cfg)
    if cfg.exhaustive:
        records = runner.exhaustive_records()
        return Report(cfg.to_dict(), records, exact=True, bound_target=runner.bound_target())
    trials = range(cfg.trials) if trials is None else trials
    records = [runner.mc_trial(k) for k in trials]
    return Report(cfg.to_dict(), records, exact=False, bound_target=runner.bound_target())


def _run_shard(args):
    cfg_dict, lo, hi = args
    return run_experiment(ExperimentConfig.from_dict(cfg_dict), range(lo, hi))


def run_sharded(cfg, shards: int, workers: int = 1) -> Report:
    """Split trials into contiguous shards, run them (optionally in processes), merge."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    if cfg.exhaustive:
        return run_experiment(cfg)
    edges = np.linspace(0, cfg.trials, shards + 1).astype(int)
    jobs = [(cfg.to_dict(), int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_shard, jobs))
    else:
        parts = [_run_shard(j) for j in jobs]
    report = parts[0]
    for p in parts[1:]:
        report = report.merge(p)
    return report


def worstcase_order_search(cfg, method: str = "exhaustive", heuristics=HEURISTICS):
    """Order minimising the policy's expected value; returns ``(order, report)``.

    ``exhaustive`` tries all n! orders (n <= 7); ``heuristic`` tries the named
    static adversaries.  Each candidate is scored by running the experiment
    with that order fixed.
    """
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    m = cfg.build_matroid()
    if method == "exhaustive":
        if m.n > EXHAUSTIVE_ORDER_LIMIT:
            raise ConfigError(f"exhaustive order search needs n <= {EXHAUSTIVE_ORDER_LIMIT} (n = {m.n})")
        candidates = [{"model": "fixed", "permutation": list(p)}
                      for p in itertools.permutations(sorted(m.ground))]
    elif method == "heuristic":
        candidates = [{"model": "heuristic", "name": h} for h in heuristics]
    else:
        raise ValueError("method must be 'exhaustive' or 'heuristic'")
    best = None
    for order in candidates:
        d = cfg.to_dict()
        d["order"] = order
        if cfg.weights["model"] == "explicit" and cfg.assignment != "random":
            d["exact"] = True
        rep = run_experiment(ExperimentConfig.from_dict(d))
        if best is None or rep.mean < best[1].mean:
            best = (order, rep)
    order, rep = best
    if order["model"] == "heuristic":
        weights = None
        if "values" in cfg.weights and cfg.assignment in ("identity",):
            weights = list(cfg.weights["values"])
        try:
            resolved = heuristic_order(order["name"], m, weights)
        except ValueError:
            resolved = order["name"]
        return resolved, rep
    return order["permutation"], rep
