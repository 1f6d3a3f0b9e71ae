"""Exact incremental knapsack solver for small instances.

Depth-first search over start periods with an LP bound.  All arithmetic is
done on integers after scaling weights, profits and multipliers by the
common denominators, so pruning decisions are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import BudgetExceeded, Instance, Schedule, period_values, schedule_value

DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class OracleResult:
    schedule: Schedule
    value: Fraction
    period_values: tuple
    nodes: int
    optimal: bool = True


class _OutOfBudget(Exception):
    pass


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def _search(inst: Instance, capacities, earliest: dict, budget: int):
    T = inst.T
    ws = _lcm_den(list(inst.weights) + list(capacities))
    ps = _lcm_den(inst.profits)
    ds = _lcm_den(inst.multipliers)
    W = [int(w * ws) for w in inst.weights]
    P = [int(p * ps) for p in inst.profits]
    D = [int(d * ds) for d in inst.multipliers]
    C = [int(math.floor(c * ws)) for c in capacities]
    S = [0] * (T + 2)
    for t in range(T, 0, -1):
        S[t] = S[t + 1] + D[t - 1]

    items = sorted(earliest, key=lambda i: (-P[i] * S[earliest[i]], i))
    m = len(items)
    # remaining items of each depth, sorted by efficiency for the LP bound
    by_eff = []
    for k in range(m):
        rest = items[k:]
        rest.sort(key=lambda i: (-Fraction(P[i], W[i]), i))
        by_eff.append(rest)
    # periods where the allowed set may change
    change = {1} | {earliest[i] for i in items}

    used = [0] * T
    starts = {}
    best = {"value": -1, "starts": {}}
    nodes = [0]

    def bound(k):
        rest = by_eff[k]
        r = [0] * T
        low = None
        for t in range(T - 1, -1, -1):
            s = C[t] - used[t]
            low = s if low is None or s < low else low
            r[t] = low
        ub = 0
        t = 1
        while t <= T:
            # extend the run while capacity and the allowed set stay fixed
            end = t
            while (end < T and r[end] == r[t - 1] and (end + 1) not in change):
                end += 1
            dsum = S[t] - S[end + 1]
            cap = r[t - 1]
            if cap > 0:
                acc_w = 0
                acc_p = 0
                for i in rest:
                    if earliest[i] > t:
                        continue
                    if acc_w + W[i] <= cap:
                        acc_w += W[i]
                        acc_p += P[i]
                    else:
                        rem = cap - acc_w
                        acc_p_num = dsum * rem * P[i]
                        ub += dsum * acc_p + -(-acc_p_num // W[i])
                        break
                else:
                    ub += dsum * acc_p
            t = end + 1
        return ub

    def dfs(k, value):
        nodes[0] += 1
        if nodes[0] > budget:
            raise _OutOfBudget
        if k == m:
            if value > best["value"]:
                best["value"] = value
                best["starts"] = dict(starts)
            return
        if value + bound(k) <= best["value"]:
            return
        i = items[k]
        w = W[i]
        # feasible starts form a suffix of periods
        first = None
        low = None
        for t in range(T - 1, earliest[i] - 2, -1):
            s = C[t] - used[t]
            low = s if low is None or s < low else low
            if low >= w:
                first = t + 1
            else:
                break
        if first is not None:
            for st in range(first, T + 1):
                for t in range(st - 1, T):
                    used[t] += w
                starts[i] = st
                dfs(k + 1, value + P[i] * S[st])
                del starts[i]
                for t in range(st - 1, T):
                    used[t] -= w
        dfs(k + 1, value)

    optimal = True
    try:
        dfs(0, 0)
    except _OutOfBudget:
        optimal = False
    return best["starts"], nodes[0], optimal


def _earliest_default(inst: Instance, capacities) -> dict:
    out = {}
    for j, w in enumerate(inst.weights):
        t = next((t for t in range(1, inst.T + 1) if capacities[t - 1] >= w), None)
        if t is not None:
            out[j] = t
    return out


def solve_exact(inst: Instance, budget: int = DEFAULT_BUDGET,
                capacities=None, earliest: Optional[dict] = None) -> OracleResult:
    """Optimal schedule of ``inst``.

    ``capacities`` and ``earliest`` restrict the problem to a residual
    instance.  Raises :class:`BudgetExceeded` carrying the best incumbent
    when more than ``budget`` search nodes are needed.
    """
    caps = tuple(inst.capacities if capacities is None else capacities)
    if earliest is None:
        earliest = _earliest_default(inst, caps)
    starts, nodes, optimal = _search(inst, caps, earliest, budget)
    sched = Schedule.from_periods(inst.n, starts)
    result = OracleResult(sched, schedule_value(inst, sched), tuple(period_values(inst, sched)),
                          nodes, optimal)
    if not optimal:
        raise BudgetExceeded(f"oracle budget of {budget} nodes exhausted", result)
    return result


def solve_residual_exact(res, budget: int = DEFAULT_BUDGET) -> OracleResult:
    return solve_exact(res.parent, budget, res.capacities, res.earliest)
