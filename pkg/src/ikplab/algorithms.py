"""Approximation algorithms for the incremental knapsack problem.

Every algorithm returns an :class:`AlgoOutput` whose schedule is feasible
for the input instance and whose value is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    AlgorithmPreconditionFailed, BudgetExceeded, Instance, NotTwoPeriods,
    NotWeightConstrained, Schedule, check_schedule, schedule_value, to_fraction,
)
from .kp import (
    EpsilonOutOfRange, KpInstance, KpSolution, as_epsilon, efficiency_key,
    kp_exact, kp_fptas, kp_split,
)
from .lp import ResidualInstance, lp_relax_baseline, lp_relax_residual, round_down


@dataclass(frozen=True)
class AlgoOutput:
    name: str
    schedule: Schedule
    value: Fraction
    guaranteed_ratio: Optional[Fraction]
    trace: dict = field(default_factory=dict, compare=False)


def _output(name, inst, starts, guarantee, trace, capacities=None):
    sched = starts if isinstance(starts, Schedule) else Schedule.from_periods(inst.n, starts)
    check_schedule(inst, sched, capacities)
    return AlgoOutput(name, sched, schedule_value(inst, sched), guarantee, trace)


def _require_weight_constrained(inst: Instance):
    if not inst.is_weight_constrained:
        raise NotWeightConstrained("every item must fit the first-period capacity")


def _solve_kp(kp: KpInstance, eps: Fraction) -> KpSolution:
    return kp_exact(kp) if eps == 0 else kp_fptas(kp, eps)


def _check_eps(eps, allow_zero=True) -> Fraction:
    eps = as_epsilon(eps)
    if not (0 <= eps < 1 if allow_zero else 0 < eps < 1):
        raise EpsilonOutOfRange(f"epsilon {eps} out of range")
    return eps


def compute_theta(multipliers) -> Fraction:
    """``sum_t Δ_t / (Δ_t + ... + Δ_T)``; the harmonic number for unit multipliers."""
    d = [to_fraction(v) for v in multipliers]
    total = Fraction(0)
    tail = Fraction(0)
    for v in reversed(d):
        tail += v
        total += v / tail
    return total


def h2_guarantee(multipliers) -> Fraction:
    d = [to_fraction(v) for v in multipliers]
    return sum(d, Fraction(0)) / sum((v * t for t, v in enumerate(d, start=1)), Fraction(0))


def ht2_guarantee(d1, d2) -> Fraction:
    r = to_fraction(d2) / to_fraction(d1)
    return (1 + 3 * r + 2 * r * r) / (1 + 4 * r + 2 * r * r)


def alg_a(inst: Instance, eps=0) -> AlgoOutput:
    """Best single knapsack solution kept from its period to the horizon.

    ``eps == 0`` solves each period exactly (the A* variant), otherwise the
    profit-scaling scheme is used.
    """
    eps = _check_eps(eps)
    best = None
    candidates = []
    for t in range(1, inst.T + 1):
        sol = _solve_kp(KpInstance.from_instance(inst, inst.capacities[t - 1]), eps)
        value = inst.tail_multiplier(t) * sol.profit
        candidates.append(value)
        if best is None or value > best[0]:
            best = (value, t, sol)
    _, t, sol = best
    name = "astar" if eps == 0 else "a"
    guarantee = (1 - eps) / compute_theta(inst.multipliers)
    return _output(name, inst, {i: t for i in sol.items}, guarantee,
                   {"candidates": candidates, "chosen_period": t})


def alg_a_prime(res: ResidualInstance, eps) -> AlgoOutput:
    """Best of the rounded residual LP and the per-period knapsack packings."""
    eps = _check_eps(eps)
    inst = res.parent
    T = inst.T
    sched, value = round_down(lp_relax_residual(res))
    best = (value, 0, sched)
    candidates = [value]
    for t in range(1, T + 1):
        items = [j for j, tj in res.earliest.items() if tj <= t]
        sol = _solve_kp(KpInstance.from_instance(inst, res.capacities[t - 1], items), eps)
        v = inst.tail_multiplier(t) * sol.profit
        candidates.append(v)
        if v > best[0]:
            best = (v, t, Schedule.from_periods(inst.n, {i: t for i in sol.items}))
    _, chosen, sched = best
    return _output("aprime", inst, sched, (1 - eps) / T,
                   {"candidates": candidates, "chosen": chosen}, res.capacities)


@dataclass(frozen=True)
class GuessConfig:
    items: tuple
    starts: tuple
    total_contribution: Fraction
    min_contribution: Fraction


def residual_for_guess(inst: Instance, guess: GuessConfig) -> ResidualInstance:
    T = inst.T
    caps = list(inst.capacities)
    for j, st in zip(guess.items, guess.starts):
        for t in range(st - 1, T):
            caps[t] -= inst.weights[j]
    for t in range(T - 2, -1, -1):
        caps[t] = min(caps[t], caps[t + 1])
    chosen = set(guess.items)
    earliest = {}
    for j in range(inst.n):
        if j in chosen:
            continue
        for t in range(1, T + 1):
            if caps[t - 1] >= inst.weights[j] and \
                    inst.profits[j] * inst.tail_multiplier(t) <= guess.min_contribution:
                earliest[j] = t
                break
    return ResidualInstance(inst, caps, earliest)


def ptas_case_bounds(eps, T: int):
    """Return ``(f, case1, case2)`` ratio factors used in the PTAS analysis."""
    eps = as_epsilon(eps)
    rho = (1 - eps) / T
    f = (1 - rho - eps) / (1 - rho)
    return f, (1 - rho) * f + rho, 1 - eps * f


DEFAULT_MAX_CONFIGS = 5_000_000


def ptas_approx(inst: Instance, eps, max_configs: int = DEFAULT_MAX_CONFIGS) -> AlgoOutput:
    """Guess the ``k = min(n, ceil(T/eps))`` largest contributions, finish with A'.

    Configurations are enumerated depth-first over items in index order;
    partial assignments that already violate a capacity are not extended,
    since every extension is infeasible too.
    """
    eps = _check_eps(eps, allow_zero=False)
    n, T = inst.n, inst.T
    k = min(n, math.ceil(T / eps))
    tails = [inst.tail_multiplier(t) for t in range(1, T + 1)]
    pc = [[inst.profits[i] * tails[t] for t in range(T)] for i in range(n)]

    best = {"value": Fraction(-1), "starts": {}}
    stats = {"k": k, "configs": 0, "small_configs": 0, "guess_configs": 0,
             "aprime_calls": 0, "cache_hits": 0}
    cache = {}
    used = [Fraction(0)] * T
    items, starts = [], []

    def record(value, assignment):
        if value > best["value"]:
            best["value"] = value
            best["starts"] = assignment

    def visit():
        stats["configs"] += 1
        if stats["configs"] > max_configs:
            raise BudgetExceeded("PTAS configuration budget exhausted")
        contribs = [pc[j][st - 1] for j, st in zip(items, starts)]
        total = sum(contribs, Fraction(0))
        if len(items) < k:
            stats["small_configs"] += 1
            record(total, dict(zip(items, starts)))
            return
        stats["guess_configs"] += 1
        guess = GuessConfig(tuple(items), tuple(starts), total, min(contribs))
        res = residual_for_guess(inst, guess)
        key = (res.capacities, tuple(res.earliest.items()))
        if key in cache:
            stats["cache_hits"] += 1
            z, rstarts = cache[key]
        elif not res.earliest:
            z, rstarts = Fraction(0), {}
            cache[key] = (z, rstarts)
        else:
            stats["aprime_calls"] += 1
            out = alg_a_prime(res, eps)
            rstarts = {i: s for i, s in enumerate(out.schedule.start) if s is not None}
            z = out.value
            cache[key] = (z, rstarts)
        assignment = dict(zip(items, starts))
        assignment.update(rstarts)
        record(total + z, assignment)

    def dfs(i):
        if i == n or len(items) == k:
            visit()
            return
        # item i left out
        dfs(i + 1)
        w = inst.weights[i]
        for st in range(1, T + 1):
            if any(used[t] + w > inst.capacities[t] for t in range(st - 1, T)):
                continue
            for t in range(st - 1, T):
                used[t] += w
            items.append(i)
            starts.append(st)
            dfs(i + 1)
            items.pop()
            starts.pop()
            for t in range(st - 1, T):
                used[t] -= w

    try:
        dfs(0)
    except BudgetExceeded as exc:
        exc.result = _output("ptas", inst, best["starts"], 1 - eps, dict(stats))
        raise
    return _output("ptas", inst, best["starts"], 1 - eps, stats)


def h1(inst: Instance) -> AlgoOutput:
    """Greedy 1/2-approximation built on the per-period split items."""
    _require_weight_constrained(inst)
    T = inst.T
    frac = lp_relax_baseline(inst)
    splits = frac.stats["splits"]
    order = sorted(range(inst.n), key=lambda i: efficiency_key(inst.profits[i], inst.weights[i], i))
    pos = {i: k for k, i in enumerate(order)}

    def prefix(s):
        return order if s is None else order[:pos[s]]

    s1 = splits[0]
    if s1 is None:
        t_hat = 1
        first = []
    else:
        head = prefix(s1)
        need = sum((inst.weights[i] for i in head), inst.weights[s1])
        t_hat = next((t for t in range(1, T + 1) if inst.capacities[t - 1] >= need), T + 1)
        head_profit = sum((inst.profits[i] for i in head), Fraction(0))
        first = head if head_profit >= inst.profits[s1] else [s1]
    starts = {}
    for t in range(1, T + 1):
        packed = first if t < t_hat else prefix(splits[t - 1])
        for i in packed:
            starts.setdefault(i, t)
    return _output("h1", inst, starts, Fraction(1, 2),
                   {"split_first": s1, "t_hat": t_hat, "first_set": list(first)})


def h2(inst: Instance) -> AlgoOutput:
    """Forward greedy: optimal knapsack on the capacity increment of each period."""
    _require_weight_constrained(inst)
    starts = {}
    load = Fraction(0)
    for t in range(1, inst.T + 1):
        free = [i for i in range(inst.n) if i not in starts]
        sol = kp_exact(KpInstance.from_instance(inst, inst.capacities[t - 1] - load, free))
        for i in sol.items:
            starts[i] = t
        load += sol.weight
    return _output("h2", inst, starts, h2_guarantee(inst.multipliers), {})


def h2_backward(inst: Instance) -> AlgoOutput:
    """Backward variant: solve the last period, then shrink period by period.

    Carries no approximation guarantee.
    """
    _require_weight_constrained(inst)
    T = inst.T
    allowed = list(range(inst.n))
    starts = {}
    for t in range(T, 0, -1):
        sol = kp_exact(KpInstance.from_instance(inst, inst.capacities[t - 1], allowed))
        allowed = list(sol.items)
        for i in allowed:
            starts[i] = t
    return _output("h2b", inst, starts, None, {})


@dataclass(frozen=True)
class HT2Subsets:
    both: tuple          # in both knapsack solutions
    first_only: tuple    # rest of the first-period solution
    second_fit: tuple    # rest of the second solution fitting the first capacity
    crossing: tuple      # first item of the second solution overflowing it (0 or 1 item)
    second_rest: tuple


def ht2_subsets(sol1: KpSolution, sol2: KpSolution, c1, weights) -> HT2Subsets:
    """Decompose the two period solutions; ``weights`` is indexable by item id."""
    c1 = to_fraction(c1)

    def w(items):
        return sum((weights[i] for i in items), Fraction(0))

    both = sorted(set(sol1.items) & set(sol2.items))
    first_only = sorted(set(sol1.items) - set(both))
    fit, crossing, rest = [], [], []
    load = w(both)
    for i in sorted(set(sol2.items) - set(both)):
        if crossing:
            rest.append(i)
        elif load + weights[i] <= c1:
            fit.append(i)
            load += weights[i]
        else:
            crossing.append(i)
    assert w(both) + w(first_only) <= c1
    assert w(both) + w(fit) <= c1
    assert w(both) + w(fit) + w(crossing) + w(rest) == sol2.weight
    if crossing:
        assert w(both) + w(fit) + w(crossing) > c1
    else:
        assert not rest
    return HT2Subsets(tuple(both), tuple(first_only), tuple(fit), tuple(crossing), tuple(rest))


def ht2(inst: Instance, eps=0) -> AlgoOutput:
    """Two-period algorithm: best of three schedules built from the two knapsack optima."""
    if inst.T != 2:
        raise NotTwoPeriods(f"ht2 needs exactly two periods, got {inst.T}")
    _require_weight_constrained(inst)
    eps = _check_eps(eps)
    c1, c2 = inst.capacities
    sol1 = _solve_kp(KpInstance.from_instance(inst, c1), eps)
    sol2 = _solve_kp(KpInstance.from_instance(inst, c2), eps)
    sub = ht2_subsets(sol1, sol2, c1, inst.weights)
    cands = {
        "a": {**{i: 1 for i in sub.both + sub.first_only}, **{i: 2 for i in sub.second_rest}},
        "b": {**{i: 1 for i in sub.both + sub.second_fit},
              **{i: 2 for i in sub.crossing + sub.second_rest}},
        "c": {**{i: 1 for i in sub.crossing},
              **{i: 2 for i in sub.both + sub.second_fit + sub.second_rest}},
    }
    values = {}
    for name, starts in cands.items():
        s = Schedule.from_periods(inst.n, starts)
        check_schedule(inst, s)
        values[name] = schedule_value(inst, s)
    chosen = max(values, key=lambda k: values[k])
    guarantee = ht2_guarantee(*inst.multipliers) * (1 - eps)
    return _output("ht2", inst, cands[chosen], guarantee,
                   {"candidates": values, "chosen": chosen, "subsets": sub})


ALGORITHMS = {
    "astar": lambda inst, eps=0: alg_a(inst, 0),
    "a": alg_a,
    "h1": lambda inst, eps=0: h1(inst),
    "h2": lambda inst, eps=0: h2(inst),
    "h2b": lambda inst, eps=0: h2_backward(inst),
    "ht2": ht2,
    "ptas": ptas_approx,
}

__all__ = [
    "AlgoOutput", "AlgorithmPreconditionFailed", "GuessConfig", "HT2Subsets",
    "alg_a", "alg_a_prime", "compute_theta", "h1", "h2", "h2_backward",
    "h2_guarantee", "ht2", "ht2_guarantee", "ht2_subsets", "ptas_approx",
    "ptas_case_bounds", "residual_for_guess",
]
