"""Command line front end: ``matsec <command> ...`` or ``python -m matsec``.

Commands print JSON (or CSV where offered) on stdout.  ``simulate`` and
``lp`` exit with status 1 when a declared bound fails, 0 otherwise.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from .classical import (evaluate_policy_enumeration, evaluate_policy_exact, harmonic_policy,
                        one_over_e_policy, simulate_policy)
from .hardness import SINGLE_CHOICE_POLICIES, hardness_sweep
from .harness import ConfigError, ExperimentConfig, run_sharded, worstcase_order_search
from .lp import build_secretary_lp, lower_bound, solve_lp_exact, upper_bound
from .matroid import load_matroid
from .principal import principal_minors


def _frac(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_simulate(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    report = run_sharded(cfg, args.shards, args.workers)
    fmt = args.format or ("csv" if args.out and args.out.endswith(".csv") else "json")
    _emit(report.to_csv() if fmt == "csv" else report.to_json(), args.out)
    return 1 if report.passed is False else 0


def cmd_worstcase(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    order, report = worstcase_order_search(cfg, args.method)
    d = report.to_dict()
    d["order"] = order
    _emit(json.dumps(d, indent=2, sort_keys=True), args.out)
    return 1 if report.passed is False else 0


def cmd_principal(args) -> int:
    m = load_matroid(args.matroid)
    dec = principal_minors(m)
    minors = [{"elements": sorted(pm.elements), "rank": pm.rank, "density": _frac(pm.density)}
              for pm in dec.minors]
    if args.format == "json":
        _emit(json.dumps({"n": m.n, "rank": m.rank(), "loops": sorted(dec.loops), "minors": minors}, indent=2), None)
    else:
        lines = [f"M_{k}: rank {pm['rank']}, density {pm['density']}, elements {pm['elements']}"
                 for k, pm in enumerate(minors, start=1)]
        lines.append(f"loops: {sorted(dec.loops)}")
        _emit("\n".join(lines), None)
    return 0


def cmd_lp(args) -> int:
    lp = build_secretary_lp(args.n, weakened=args.weakened)
    sol = solve_lp_exact(lp)
    lo, hi = lower_bound(args.n), upper_bound(args.n)
    # the weakened program drops rows, so only the upper bound can fail for it
    ok = sol.status == "optimal" and sol.alpha <= hi and (args.weakened or sol.alpha >= lo)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["variable", "value", "float"])
        for i, p in enumerate(sol.p, start=1):
            w.writerow([f"p{i}", _frac(p), float(p)])
        w.writerow(["alpha", _frac(sol.alpha), float(sol.alpha)])
        _emit(buf.getvalue(), None)
    else:
        _emit(json.dumps({
            "N": args.n, "weakened": args.weakened, "status": sol.status,
            "alpha": _frac(sol.alpha), "alpha_float": float(sol.alpha),
            "p": [_frac(p) for p in sol.p],
            "lower_bound": _frac(lo), "upper_bound": _frac(hi),
            "pivots": sol.pivots, "pass": ok,
        }, indent=2), None)
    return 0 if ok else 1


def cmd_policy_eval(args) -> int:
    schedule = harmonic_policy(args.N) if args.policy == "harmonic" else one_over_e_policy(args.N)
    ns = [args.n] if args.n else list(range(1, args.N + 1))
    rows = []
    for n in ns:
        if args.method == "exact":
            v = evaluate_policy_exact(schedule, n)
            rows.append({"n": n, "success": _frac(v), "float": float(v)})
        elif args.method == "enumerate":
            v = evaluate_policy_enumeration(schedule, n)
            rows.append({"n": n, "success": _frac(v), "float": float(v)})
        else:
            rng = np.random.default_rng(args.seed)
            rows.append({"n": n, "success": simulate_policy(schedule, n, args.trials, rng)})
    _emit(json.dumps({"policy": args.policy, "N": args.N, "method": args.method, "results": rows}, indent=2), None)
    return 0


def cmd_hardness(args) -> int:
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    report = hardness_sweep(policies, 2 ** args.levels, gamma=args.gamma, trials=args.trials,
                            seed=args.seed, threshold_level=args.threshold_level)
    _emit(report.to_csv() if args.format == "csv" else report.to_json(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matsec", description="Matroid secretary experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run an experiment config")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "csv"))
    s.add_argument("--shards", type=int, default=1)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("worstcase", help="search arrival orders for the weakest one")
    s.add_argument("--config", required=True)
    s.add_argument("--method", choices=("exhaustive", "heuristic"), default="exhaustive")
    s.add_argument("--out")
    s.set_defaults(func=cmd_worstcase)

    s = sub.add_parser("principal-seq", help="principal minors of a matroid file")
    s.add_argument("--matroid", required=True)
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.set_defaults(func=cmd_principal)

    s = sub.add_parser("lp", help="solve the unknown-length secretary LP exactly")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--weakened", action="store_true")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_lp)

    s = sub.add_parser("policy-eval", help="success probability of a single-choice policy")
    s.add_argument("--policy", choices=("harmonic", "one-over-e"), required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--n", type=int)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exact", dest="method", action="store_const", const="exact")
    g.add_argument("--enumerate", dest="method", action="store_const", const="enumerate")
    g.add_argument("--simulate", dest="method", action="store_const", const="simulate")
    s.add_argument("--trials", type=int, default=100000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_policy_eval, method="exact")

    s = sub.add_parser("hardness", help="sweep single-choice policies over the hard distribution")
    s.add_argument("--gamma", type=float)
    s.add_argument("--levels", type=int, required=True, help="stream bound N = 2^levels")
    s.add_argument("--policies", default=",".join(SINGLE_CHOICE_POLICIES))
    s.add_argument("--trials", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threshold-level", type=int, default=4)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_hardness)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"matsec: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
