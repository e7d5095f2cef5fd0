import json
import math
from fractions import Fraction

import pytest

from matsec.classical import harmonic
from matsec.harness import (ConfigError, ExperimentConfig, heuristic_order, run_experiment,
                            run_sharded, worstcase_order_search)
from matsec.matroid import PartitionMatroid, UniformMatroid, triangle_with_pendant


def base(**kw):
    cfg = {"matroid": {"type": "uniform", "r": 2, "n": 5}, "policy": {"name": "alg3", "L": "midpoint"},
           "trials": 200, "seed": 7}
    cfg.update(kw)
    return cfg


@pytest.mark.parametrize("bad, message", [
    ({"trials": 0}, "trials"),
    ({"weights": {"model": "explicit", "values": [3, 3, 1, 0, -1]}}, "strictly decreasing"),
    ({"weights": {"model": "explicit", "values": [5, 4, 3]}}, "need 5"),
    ({"matroid": {"type": "uniform", "r": 2, "n": 8}, "order": {"model": "exhaustive"}, "assignment": "identity"}, "n <= 7"),
    ({"order": {"model": "heuristic", "name": "sneaky"}}, "heuristic"),
    ({"policy": {"name": "alg1"}, "mode": "MN"}, "needs mode MK"),
    ({"surprise": 1}, "unknown config keys"),
    ({"weights": {"model": "hard", "gamma": 0.5}}, "gamma"),
    ({"order": {"model": "fixed", "permutation": [0, 1, 2]}}, "permutation"),
])
def test_config_validation(bad, message):
    with pytest.raises(ConfigError, match=message):
        run_experiment(base(**bad))


def test_harmonic_exhaustive_success_is_exact():
    cfg = {"matroid": {"type": "uniform", "r": 1, "n": 5}, "policy": {"name": "harmonic", "N": 5},
           "weights": {"model": "explicit", "values": [5, 4, 3, 2, 1]}, "assignment": "identity",
           "order": {"model": "exhaustive"}, "metric": "success", "trials": 1}
    rep = run_experiment(cfg)
    assert rep.exact and rep.mean == 1 / (harmonic(4) + 1) == Fraction(12, 37)
    for n in range(1, 5):
        cfg["matroid"] = {"type": "uniform", "r": 1, "n": n}
        cfg["weights"]["values"] = list(range(n, 0, -1))
        assert run_experiment(cfg).mean == Fraction(12, 37)


def test_same_seed_bitwise_identical():
    a = run_experiment(base()).to_json()
    b = run_experiment(base()).to_json()
    assert a == b
    assert run_experiment(base()).to_csv() == run_experiment(base()).to_csv()
    assert run_experiment(base(seed=8)).to_json() != a


def test_sharded_runs_merge_to_sequential():
    cfg = base(trials=150)
    seq = run_experiment(cfg)
    for shards, workers in ((1, 1), (4, 1), (3, 3)):
        assert run_sharded(cfg, shards, workers).to_json() == seq.to_json()


def test_merge_is_associative_and_order_free():
    cfg = ExperimentConfig.from_dict(base(trials=90))
    a = run_experiment(cfg, range(0, 30))
    b = run_experiment(cfg, range(30, 60))
    c = run_experiment(cfg, range(60, 90))
    left = a.merge(b).merge(c).to_json()
    assert left == a.merge(b.merge(c)).to_json() == c.merge(a).merge(b).to_json()
    assert left == run_experiment(cfg).to_json()
    with pytest.raises(ValueError):
        a.merge(a)


def test_aggregates_recomputable_from_records():
    rep = run_experiment(base(trials=300))
    vals = [r.value for r in rep.records]
    assert rep.mean == pytest.approx(sum(vals) / len(vals))
    mean = sum(vals) / len(vals)
    sd = math.sqrt(sum((v - mean) ** 2 for v in vals) / (len(vals) - 1))
    assert rep.stderr == pytest.approx(sd / math.sqrt(len(vals)))
    assert rep.ratio == pytest.approx(sum(r.opt for r in rep.records) / sum(vals))


def test_monte_carlo_matches_exhaustive_within_four_sigma():
    common = {"matroid": {"type": "uniform", "r": 2, "n": 4}, "policy": {"name": "alg3", "L": "midpoint"},
              "weights": {"model": "explicit", "values": [8, 5, 3, 1]}}
    exact = run_experiment({**common, "assignment": "all", "order": {"model": "exhaustive"}, "trials": 1})
    mc = run_experiment({**common, "trials": 20000, "seed": 1})
    assert abs(mc.mean - float(exact.mean)) < 4 * mc.stderr
    for name in ("alg4", "threshold-price"):
        common["policy"] = {"name": name}
        exact = run_experiment({**common, "assignment": "all", "order": {"model": "exhaustive"}, "trials": 1})
        mc = run_experiment({**common, "trials": 20000, "seed": 2})
        assert abs(mc.mean - float(exact.mean)) < 4 * mc.stderr


def test_uniform_orders_are_symmetric_for_alg1():
    values = set()
    for order in ({"model": "fixed", "permutation": p} for p in ([0, 1, 2, 3, 4], [4, 2, 0, 1, 3], [1, 0, 4, 3, 2])):
        cfg = {"matroid": {"type": "uniform", "r": 2, "n": 5}, "policy": {"name": "alg1"},
               "assignment": "all", "order": order, "trials": 1}
        values.add(run_experiment(cfg).mean)
    assert len(values) == 1
    cfg = {"matroid": {"type": "uniform", "r": 2, "n": 5}, "policy": {"name": "alg1"},
           "assignment": "all", "trials": 1}
    order, rep = worstcase_order_search(cfg)
    assert rep.mean == values.pop()


def test_worst_order_for_alg3_keeps_guarantee():
    cfg = {"matroid": {"type": "uniform", "r": 3, "n": 6}, "policy": {"name": "alg3", "L": "midpoint"},
           "weights": {"model": "explicit", "values": [32, 16, 8, 4, 2, 1]}, "assignment": "identity",
           "trials": 1}
    order, rep = worstcase_order_search(cfg)
    assert sorted(order) == list(range(6))
    assert rep.exact and rep.mean >= Fraction(56) / (16 * math.log2(3))
    assert rep.mean >= 16  # half the top weight


def test_loops_last_hides_the_stream_end():
    # one block of four non-loops and a zero-capacity block of eight loops
    cfg = {"matroid": {"type": "partition", "blocks": [[0, 1, 2, 3], list(range(4, 12))], "capacities": [1, 0]},
           "policy": {"name": "threshold-price"}, "assignment": "identity",
           "weights": {"model": "explicit", "values": list(range(12, 0, -1))}, "trials": 50}
    order, rep = worstcase_order_search(cfg, "heuristic", ("loops-first", "loops-last", "identity"))
    assert rep.mean == 0
    assert order[:4] == [0, 1, 2, 3]
    first = run_experiment({**cfg, "order": {"model": "heuristic", "name": "loops-first"}})
    assert first.mean > 0


def test_exhaustive_search_rejects_large_n():
    cfg = {"matroid": {"type": "uniform", "r": 2, "n": 8}, "policy": {"name": "alg4"}, "trials": 1}
    with pytest.raises(ConfigError):
        worstcase_order_search(cfg)


def test_heuristic_orders():
    m = PartitionMatroid([[0, 2], [1, 3, 4]], [0, 1])
    assert heuristic_order("loops-first", m) == [0, 2, 1, 3, 4]
    assert heuristic_order("loops-last", m) == [1, 3, 4, 0, 2]
    assert heuristic_order("alternating", UniformMatroid(1, 5)) == [0, 4, 1, 3, 2]
    assert heuristic_order("descending-weight", UniformMatroid(1, 3), [1, 9, 5]) == [1, 2, 0]
    assert heuristic_order("forest-last", triangle_with_pendant()) == [2, 0, 1, 3]
    with pytest.raises(ValueError):
        heuristic_order("descending-weight", UniformMatroid(1, 3))


def test_hard_weights_run():
    cfg = {"matroid": {"type": "uniform", "r": 1, "n": 14}, "policy": {"name": "harmonic", "N": 14},
           "weights": {"model": "hard", "gamma": 0.25}, "trials": 300, "seed": 3}
    rep = run_experiment(cfg)
    assert 0 < rep.mean <= rep.mean_opt
    assert all(r.value in (0,) or r.value >= 2 ** 0.25 for r in rep.records)


def test_report_formats_and_bounds():
    rep = run_experiment(base(bound={"kind": "absolute", "value": 1e9, "source": "silly"}))
    d = json.loads(rep.to_json())
    for key in ("config_echo", "trials", "mean", "stderr", "bound", "bound_source", "pass"):
        assert key in d
    assert d["pass"] is False and d["bound_source"] == "silly"
    header = rep.to_csv().splitlines()[0]
    assert header == "trial,policy,value,opt,ratio,seed"
    ok = run_experiment(base(bound={"kind": "opt_fraction", "factor": 0.01}))
    assert ok.passed is True
    assert run_experiment(base()).passed is None
