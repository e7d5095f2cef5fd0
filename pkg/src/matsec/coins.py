"""Random sources for online policies.

Policies draw all internal randomness through a small coin interface:
``bernoulli(p)``, ``integers(k)`` (uniform on ``0..k-1``) and ``random()``.
:class:`NumpyCoins` backs it with a seeded numpy generator.
:func:`enumerate_outcomes` replays a deterministic computation under every
coin outcome and returns the exact probability of each branch, which turns
any discrete-coin policy into an exact expectation.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = [
    "NumpyCoins",
    "ScriptedCoins",
    "enumerate_outcomes",
    "exact_expectation",
    "trial_seed",
    "trial_rng",
]


class NumpyCoins:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def bernoulli(self, p) -> bool:
        if p >= 1:
            return True
        if p <= 0:
            return False
        return bool(self.rng.random() < float(p))

    def integers(self, k: int) -> int:
        return int(self.rng.integers(k))

    def random(self) -> float:
        return float(self.rng.random())


class ContinuousDraw(RuntimeError):
    """A continuous draw cannot be enumerated."""


class ScriptedCoins:
    """Follows a fixed prefix of branch choices, then takes branch 0.

    ``arities`` and ``probs`` record every decision point that was reached.
    """

    def __init__(self, script=()):
        self.script = list(script)
        self.pos = 0
        self.arities = []
        self.probs = []

    def _choose(self, branch_probs):
        live = [i for i, p in enumerate(branch_probs) if p != 0]
        if self.pos < len(self.script):
            k = self.script[self.pos]
        else:
            k = 0
            self.script.append(0)
        self.pos += 1
        self.arities.append(len(live))
        chosen = live[k]
        self.probs.append(branch_probs[chosen])
        return chosen

    def bernoulli(self, p) -> bool:
        p = Fraction(p)
        if p >= 1:
            return True
        if p <= 0:
            return False
        return self._choose([p, 1 - p]) == 0

    def integers(self, k: int) -> int:
        return self._choose([Fraction(1, k)] * k)

    def random(self) -> float:
        raise ContinuousDraw("continuous draws cannot be enumerated exactly")


def enumerate_outcomes(fn):
    """Run ``fn(coins)`` once per coin branch; yield ``(probability, result)``.

    ``fn`` must be deterministic given its coins.  Probabilities are exact
    fractions and sum to one.
    """
    script = []
    while True:
        coins = ScriptedCoins(script)
        result = fn(coins)
        prob = Fraction(1)
        for p in coins.probs:
            prob *= p
        yield prob, result
        path = coins.script[:coins.pos]
        arities = coins.arities
        while path and path[-1] + 1 >= arities[len(path) - 1]:
            path.pop()
        if not path:
            return
        path[-1] += 1
        script = path


def exact_expectation(fn, value=lambda r: r):
    total = 0
    for prob, result in enumerate_outcomes(fn):
        total += prob * value(result)
    return total


def trial_seed(master_seed: int, trial: int) -> int:
    """Per-trial seed derived from ``(master_seed, trial)`` via SeedSequence."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(trial),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(trial_seed(master_seed, trial))
