"""Command-line front end: ``ikp-lab solve|generate|verify|bench``."""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import algorithms as alg
from .core import (
    AlgorithmPreconditionFailed, BudgetExceeded, IKPError, Instance, ParameterOutOfRange,
    RatioReport, evaluate,
)
from .files import InstanceFile, ParseError, jsonable, parse_number, parse_rational, read_instance
from .lp import lp_relax_baseline, lp_relax_fast, residual_from_instance
from .oracle import DEFAULT_BUDGET, solve_exact
from .worstcase import (
    CertificateViolation, FAMILIES, astar_family, gen_backward_counterexample, gen_tight_astar,
    gen_tight_h1, gen_tight_h2, gen_tight_ht2, random_instance, ratio_sweep,
    verify_duality_astar, verify_duality_ht2,
)

SOLVE_ALGORITHMS = ("exact", "lp", "lp-fast", "a", "astar", "aprime", "ptas",
                    "h1", "h2", "h2b", "ht2")


def oracle_budget(default=DEFAULT_BUDGET) -> int:
    env = os.environ.get("IKP_LAB_BUDGET")
    return int(env) if env else default


@dataclass
class RunReport:
    instance_id: str
    results: list = field(default_factory=list)
    oracle: dict = None
    ratios: list = field(default_factory=list)

    def to_json(self):
        return jsonable({"instance": self.instance_id, "results": self.results,
                         "oracle": self.oracle, "ratios": self.ratios})


def run_algorithm(inst: Instance, name: str, eps=Fraction(0), budget=DEFAULT_BUDGET) -> dict:
    """Run one algorithm; returns a report row with value, schedule and timing."""
    t0 = time.perf_counter()
    row = {"algorithm": name}
    if name == "exact":
        res = solve_exact(inst, budget)
        row.update(value=res.value, schedule=list(res.schedule.start), guaranteed_ratio=1,
                   nodes=res.nodes)
    elif name in ("lp", "lp-fast"):
        frac = lp_relax_baseline(inst) if name == "lp" else lp_relax_fast(inst)
        row.update(value=frac.objective, fractional=[list(r) for r in frac.x],
                   guaranteed_ratio=None)
    else:
        if name == "aprime":
            out = alg.alg_a_prime(residual_from_instance(inst), eps or Fraction(1, 10))
        elif name == "a":
            out = alg.alg_a(inst, eps or Fraction(1, 10))
        elif name == "ptas":
            out = alg.ptas_approx(inst, eps or Fraction(1, 2))
        elif name == "ht2":
            out = alg.ht2(inst, eps)
        else:
            out = alg.ALGORITHMS[name](inst)
        row.update(value=out.value, schedule=list(out.schedule.start),
                   guaranteed_ratio=out.guaranteed_ratio)
    row["elapsed_seconds"] = round(time.perf_counter() - t0, 6)
    return row


def cmd_solve(path, algorithm, eps=Fraction(0), with_oracle=False, budget=None) -> RunReport:
    if algorithm not in SOLVE_ALGORITHMS:
        raise ParameterOutOfRange(f"unknown algorithm {algorithm!r}")
    budget = oracle_budget() if budget is None else budget
    inst = read_instance(path).instance
    report = RunReport(str(path))
    row = run_algorithm(inst, algorithm, eps, budget)
    report.results.append(row)
    if with_oracle and algorithm != "exact":
        res = solve_exact(inst, budget)
        report.oracle = {"value": res.value, "schedule": list(res.schedule.start),
                         "nodes": res.nodes}
        if "schedule" in row:
            r = RatioReport.build(algorithm, row["value"], res.value, row["guaranteed_ratio"])
            report.ratios.append(r)
    return report


def _deltas(text):
    return [parse_number(v) for v in str(text).replace(":", ",").split(",") if v.strip()]


def cmd_generate(family: str, params: dict, out_path=None) -> InstanceFile:
    p = dict(params)
    if family == "astar":
        inst = gen_tight_astar(p["deltas"])
    elif family == "h1":
        inst = gen_tight_h1(p["M"], p["T"], p.get("deltas"), p.get("delta", Fraction(1, 1000)))
    elif family == "h2":
        inst = gen_tight_h2(p["M"], p["T"], p.get("deltas"))
    elif family == "backward":
        inst = gen_backward_counterexample(p["T"], p.get("gamma", Fraction(1, 1000)))
    elif family == "ht2":
        inst = gen_tight_ht2(p["d1"], p["d2"], p.get("gamma", Fraction(1, 1000)))
    elif family == "random":
        inst = random_instance(p["seed"], p["n"], p["T"],
                               (p.get("wmin", 1), p.get("wmax", 20)),
                               (p.get("pmin", 1), p.get("pmax", 20)),
                               (p.get("dmin", 1), p.get("dmax", 1)),
                               p.get("weight_constrained", False))
    else:
        raise ParameterOutOfRange(f"unknown family {family!r}")
    meta = {"family": family, "parameters": {k: v for k, v in p.items() if v is not None}}
    f = InstanceFile(inst, jsonable(meta))
    if out_path is not None:
        Path(out_path).write_text(f.dumps())
    return f


def _guarantee_one(args) -> list:
    seed, k, n, T, ptas_eps, budget, eps = args
    inst_seed = seed * 100003 + k
    inst = random_instance(inst_seed, n, T, multiplier_range=(1, 3), weight_constrained=True)
    z = solve_exact(inst, budget).value
    outs = [alg.alg_a(inst, 0), alg.alg_a(inst, eps), alg.h1(inst), alg.h2(inst)]
    if T == 2:
        outs.append(alg.ht2(inst))
    outs.append(alg.alg_a_prime(residual_from_instance(inst), eps))
    if ptas_eps is not None:
        outs.append(alg.ptas_approx(inst, ptas_eps))
    reports = []
    for out in outs:
        evaluate(inst, out.schedule)
        reports.append(RatioReport.build(out.name, out.value, z, out.guaranteed_ratio,
                                         {"instance": k, "seed": inst_seed}))
    return reports


def guarantee_check(seed: int, n: int, T: int, count: int, ptas_eps=None,
                    budget=DEFAULT_BUDGET, eps=Fraction(1, 10), workers: int = 1) -> list:
    """Random weight-constrained instances; every algorithm against the oracle.

    Instances are independent, so ``workers > 1`` spreads them over a process
    pool; results are merged in instance order either way.
    """
    jobs = [(seed, k, n, T, ptas_eps, budget, eps) for k in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_guarantee_one, jobs))
    else:
        chunks = [_guarantee_one(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]


def cmd_verify(what: str, params: dict):
    if what == "duality-astar":
        deltas = params["deltas"]
        opt = params.get("opt") or astar_family(deltas).opt
        return [verify_duality_astar(deltas, opt)]
    if what == "duality-ht2":
        d1, d2 = params.get("d1", 1), params.get("d2")
        if params.get("dr") is not None:
            d1, d2 = Fraction(1), params["dr"]
        r = Fraction(d2) / Fraction(d1)
        opt = params.get("opt") or 1 + 4 * r + 2 * r * r
        return [verify_duality_ht2(d1, d2, opt, params.get("eps") or 0)]
    if what == "ratio-sweep":
        fixed = dict(params.get("set") or {})
        sweep = dict(params.get("sweep") or {})
        keys = list(sweep)
        grid = [{**fixed, **dict(zip(keys, combo))}
                for combo in itertools.product(*(sweep[k] for k in keys))] or [fixed]
        return ratio_sweep(params["family"], grid, params["alg"],
                           params.get("reference", "oracle"), oracle_budget())
    if what == "guarantees":
        return guarantee_check(params.get("seed", 0), params["n"], params["T"],
                               params.get("count", 100), params.get("ptas_eps"), oracle_budget(),
                               workers=params.get("workers") or 1)
    raise ParameterOutOfRange(f"unknown verification {what!r}")


def _fmt(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator == 1 else f"{v} ({float(v):.6g})"
    if v is None:
        return "-"
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(jsonable(v), separators=(",", ":"))
    return str(v)


def print_table(rows, columns, file=None):
    file = file or sys.stdout
    cells = [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    print("  ".join(c.ljust(w) for c, w in zip(columns, widths)), file=file)
    for row in cells:
        print("  ".join(v.ljust(w) for v, w in zip(row, widths)), file=file)


def _arg(parse):
    """Wrap a parser so argparse reports the ParseError text."""
    def inner(text):
        try:
            return parse(text)
        except ParseError as err:
            raise argparse.ArgumentTypeError(f"ParseError: {err}") from None
    inner.__name__ = parse.__name__
    return inner


def _kv(items):
    out = {}
    for item in items or []:
        key, _, value = item.partition("=")
        out[key] = value
    return out


def _typed(key, value):
    if key == "deltas":
        return _deltas(value)
    if key in ("T", "n", "seed", "M"):
        return int(value)
    return parse_number(value)


def build_parser():
    p = argparse.ArgumentParser(prog="ikp-lab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run one algorithm on an instance file")
    s.add_argument("path")
    s.add_argument("--alg", required=True, choices=SOLVE_ALGORITHMS)
    s.add_argument("--eps", type=_arg(parse_number), default=Fraction(0))
    s.add_argument("--oracle", action="store_true", help="also compute the optimum")
    s.add_argument("--json", action="store_true")

    g = sub.add_parser("generate", help="write a tight or random instance")
    g.add_argument("--family", required=True, choices=sorted(FAMILIES) + ["random"])
    g.add_argument("--deltas", type=_arg(_deltas))
    g.add_argument("--M", type=int)
    g.add_argument("--T", "--t", dest="T", type=int)
    g.add_argument("--delta", type=_arg(parse_number))
    g.add_argument("--gamma", type=_arg(parse_number))
    g.add_argument("--d1", type=_arg(parse_number))
    g.add_argument("--d2", type=_arg(parse_number))
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--wmin", type=int, default=1)
    g.add_argument("--wmax", type=int, default=20)
    g.add_argument("--pmin", type=int, default=1)
    g.add_argument("--pmax", type=int, default=20)
    g.add_argument("--dmin", type=int, default=1)
    g.add_argument("--dmax", type=int, default=1)
    g.add_argument("--weight-constrained", action="store_true")
    g.add_argument("--out")

    v = sub.add_parser("verify", help="certificates, ratio sweeps and guarantee checks")
    v.add_argument("what", choices=("duality-astar", "duality-ht2", "ratio-sweep", "guarantees"))
    v.add_argument("--deltas", type=_arg(_deltas))
    v.add_argument("--opt", type=_arg(parse_rational))
    v.add_argument("--d1", type=_arg(parse_rational))
    v.add_argument("--d2", type=_arg(parse_rational))
    v.add_argument("--dr", type=_arg(parse_rational))
    v.add_argument("--eps", type=_arg(parse_rational))
    v.add_argument("--family")
    v.add_argument("--alg")
    v.add_argument("--set", action="append", metavar="KEY=VALUE")
    v.add_argument("--sweep", action="append", metavar="KEY=V1,V2,...")
    v.add_argument("--reference", default="oracle", choices=("oracle", "closed-form"))
    v.add_argument("--random", action="store_true")
    v.add_argument("--n", type=int)
    v.add_argument("--T", "--t", dest="T", type=int)
    v.add_argument("--count", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--ptas-eps", type=_arg(parse_number))
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--json", action="store_true")

    b = sub.add_parser("bench", help="ratio and timing statistics on random instances")
    b.add_argument("--n", type=int, default=8)
    b.add_argument("--T", "--t", dest="T", type=int, default=2)
    b.add_argument("--count", type=int, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--algs", default="astar,a,h1,h2,ht2")
    b.add_argument("--json", action="store_true")
    return p


def _emit(args, payload, rows, columns):
    if args.json:
        print(json.dumps(jsonable(payload), indent=2))
    else:
        print_table(rows, columns)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (CertificateViolation,) as err:
        print(f"certificate violation: {err}", file=sys.stderr)
        return 1
    except BudgetExceeded as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return 3
    except FileNotFoundError as err:
        print(f"file not found: {err.filename}", file=sys.stderr)
        return 2
    except (ParseError, AlgorithmPreconditionFailed, IKPError) as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "solve":
        rep = cmd_solve(args.path, args.alg, args.eps, args.oracle)
        rows = [{**r, "elapsed_seconds": r["elapsed_seconds"]} for r in rep.results]
        if rep.oracle:
            rows.append({"algorithm": "oracle", "value": rep.oracle["value"],
                         "schedule": rep.oracle["schedule"]})
        _emit(args, rep.to_json(), rows,
              ["algorithm", "value", "guaranteed_ratio", "schedule", "elapsed_seconds"])
        return 0

    if args.command == "generate":
        params = {k: getattr(args, k) for k in ("deltas", "M", "T", "delta", "gamma", "d1", "d2",
                                                 "n", "seed", "wmin", "wmax", "pmin", "pmax",
                                                 "dmin", "dmax")}
        params["weight_constrained"] = args.weight_constrained
        params = {k: v for k, v in params.items() if v is not None}
        if args.family != "random":
            keep = {"astar": ("deltas",), "h1": ("M", "T", "deltas", "delta"),
                    "h2": ("M", "T", "deltas"), "backward": ("T", "gamma"),
                    "ht2": ("d1", "d2", "gamma")}[args.family]
            params = {k: v for k, v in params.items() if k in keep}
        f = cmd_generate(args.family, params, args.out)
        if args.out is None:
            sys.stdout.write(f.dumps())
        return 0

    if args.command == "verify":
        params = {k: getattr(args, k) for k in ("deltas", "opt", "d1", "d2", "dr", "eps", "family",
                                                 "alg", "reference", "n", "T", "count", "seed",
                                                 "ptas_eps", "workers")}
        params["set"] = {k: _typed(k, v) for k, v in _kv(args.set).items()}
        params["sweep"] = {k: [_typed(k, x) for x in v.split(",")]
                           for k, v in _kv(args.sweep).items()}
        reports = cmd_verify(args.what, params)
        if args.what.startswith("duality"):
            rep = reports[0]
            rows = [{"check": args.what, "primal_violation": rep.primal_violation,
                     "dual_violation": rep.dual_violation, "primal_objective": rep.primal_objective,
                     "dual_objective": rep.dual_objective, "gap": rep.gap,
                     "verified": rep.verified}]
            payload = {"verified": rep.verified, "report": rep}
            _emit(args, payload, rows, list(rows[0]))
            return 0 if rep.verified else 1
        ok = all(r.guarantee_satisfied for r in reports)
        rows = [{"algorithm": r.algorithm, "params": r.params, "value": r.value,
                 "reference": r.reference_value, "achieved": r.achieved_ratio,
                 "guaranteed": r.guaranteed_ratio, "ok": r.guarantee_satisfied} for r in reports]
        if args.what == "guarantees" and not args.json:
            rows = _summarize(reports)
            print_table(rows, ["algorithm", "runs", "min_achieved", "guaranteed", "ok"])
        else:
            _emit(args, {"passed": ok, "reports": reports}, rows, list(rows[0]) if rows else [])
        return 0 if ok else 1

    if args.command == "bench":
        names = [a for a in args.algs.split(",") if a]
        stats = {a: {"algorithm": a, "runs": 0, "min_ratio": None, "mean_ratio": Fraction(0),
                     "seconds": 0.0} for a in names}
        for k in range(args.count):
            inst = random_instance(args.seed * 100003 + k, args.n, args.T,
                                   multiplier_range=(1, 3), weight_constrained=True)
            z = solve_exact(inst, oracle_budget()).value
            for a in names:
                if a == "ht2" and inst.T != 2:
                    continue
                row = run_algorithm(inst, a)
                ratio = row["value"] / z
                s = stats[a]
                s["runs"] += 1
                s["seconds"] += row["elapsed_seconds"]
                s["mean_ratio"] += ratio
                s["min_ratio"] = ratio if s["min_ratio"] is None else min(s["min_ratio"], ratio)
        rows = []
        for s in stats.values():
            if s["runs"]:
                s["mean_ratio"] = float(s["mean_ratio"] / s["runs"])
                s["min_ratio"] = float(s["min_ratio"])
                s["seconds"] = round(s["seconds"], 4)
                rows.append(s)
        _emit(args, rows, rows, ["algorithm", "runs", "min_ratio", "mean_ratio", "seconds"])
        return 0
    return 2


def _summarize(reports):
    by = {}
    for r in reports:
        s = by.setdefault(r.algorithm, {"algorithm": r.algorithm, "runs": 0,
                                        "min_achieved": None, "guaranteed": r.guaranteed_ratio,
                                        "ok": True})
        s["runs"] += 1
        s["ok"] = s["ok"] and r.guarantee_satisfied
        s["min_achieved"] = r.achieved_ratio if s["min_achieved"] is None \
            else min(s["min_achieved"], r.achieved_ratio)
        if r.guaranteed_ratio is not None and (s["guaranteed"] is None or r.guaranteed_ratio < s["guaranteed"]):
            s["guaranteed"] = r.guaranteed_ratio
    return list(by.values())


if __name__ == "__main__":
    sys.exit(main())
