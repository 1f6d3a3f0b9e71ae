"""LP relaxations of the incremental knapsack and of residual instances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import IKPError, Instance, Schedule, schedule_value
from .kp import efficiency_key
from .selection import median_partition
from .simplex import LpNumericalFailure, solve_lp  # noqa: F401  (re-exported)


class InvalidResidual(IKPError, ValueError):
    pass


@dataclass(frozen=True)
class FractionalSolution:
    instance: Instance
    x: tuple                 # x[i][t-1]
    objective: Fraction
    used: tuple              # packed weight per period
    capacities: tuple
    stats: dict = field(default_factory=dict, compare=False)

    def fractional_items(self) -> list:
        return [i for i, row in enumerate(self.x) if any(0 < v < 1 for v in row)]


@dataclass(frozen=True)
class ResidualInstance:
    """Instance restricted by reduced capacities and earliest insertion times."""

    parent: Instance
    capacities: tuple
    earliest: dict           # surviving item -> earliest period t_j

    def __post_init__(self):
        object.__setattr__(self, "capacities", tuple(Fraction(c) for c in self.capacities))
        object.__setattr__(self, "earliest", dict(sorted(self.earliest.items())))

    @property
    def items(self) -> list:
        return list(self.earliest)

    @property
    def T(self) -> int:
        return self.parent.T

    def max_contribution(self) -> Fraction:
        """Largest profit contribution any surviving item can reach."""
        inst = self.parent
        return max((inst.profits[j] * inst.tail_multiplier(t) for j, t in self.earliest.items()),
                   default=Fraction(0))


def validate_residual(res: ResidualInstance) -> ResidualInstance:
    inst = res.parent
    if len(res.capacities) != inst.T:
        raise InvalidResidual("one residual capacity per period is required")
    for t in range(inst.T):
        if not 0 <= res.capacities[t] <= inst.capacities[t]:
            raise InvalidResidual(f"residual capacity of period {t + 1} out of range")
        if t and res.capacities[t - 1] > res.capacities[t]:
            raise InvalidResidual("residual capacities must be nondecreasing")
    for j, tj in res.earliest.items():
        if not 0 <= j < inst.n or not 1 <= tj <= inst.T:
            raise InvalidResidual(f"bad earliest time {tj} for item {j}")
        if res.capacities[tj - 1] < inst.weights[j]:
            raise InvalidResidual(f"item {j} does not fit at its earliest period {tj}")
    return res


def residual_from_instance(inst: Instance) -> ResidualInstance:
    """The unrestricted residual view: t_j is the first period item j fits."""
    earliest = {}
    for j, w in enumerate(inst.weights):
        t = next((t for t in range(1, inst.T + 1) if inst.capacities[t - 1] >= w), None)
        if t is not None:
            earliest[j] = t
    return ResidualInstance(inst, inst.capacities, earliest)


def _solution(inst, x, capacities, stats=None):
    T = inst.T
    used = tuple(sum((inst.weights[i] * x[i][t] for i in range(inst.n)), Fraction(0))
                 for t in range(T))
    obj = sum((inst.multipliers[t] * inst.profits[i] * x[i][t]
               for i in range(inst.n) for t in range(T) if x[i][t]), Fraction(0))
    return FractionalSolution(inst, tuple(tuple(r) for r in x), obj, used,
                              tuple(capacities), stats or {})


def _order(inst):
    return sorted(range(inst.n), key=lambda i: efficiency_key(inst.profits[i], inst.weights[i], i))


def lp_relax_baseline(inst: Instance) -> FractionalSolution:
    """Sort once, then sweep the greedy fill forward as capacities grow."""
    order = _order(inst)
    T = inst.T
    x = [[Fraction(0)] * T for _ in range(inst.n)]
    k = 0
    W = Fraction(0)
    splits = []
    for t in range(T):
        c = inst.capacities[t]
        while k < inst.n and W + inst.weights[order[k]] <= c:
            W += inst.weights[order[k]]
            k += 1
        for i in order[:k]:
            x[i][t] = Fraction(1)
        if k < inst.n:
            s = order[k]
            x[s][t] = (c - W) / inst.weights[s]
            splits.append(s)
        else:
            splits.append(None)
    return _solution(inst, x, inst.capacities, {"splits": splits})


class _Node:
    __slots__ = ("items", "low", "high", "w_low", "p_low")

    def __init__(self, items):
        self.items = items
        self.low = None


class PartitionTree:
    """Median partition tree over the efficiency order, built on demand.

    Each node is partitioned at most once no matter how many capacities are
    queried; ``work`` counts the items touched by partitioning and ``visits``
    the nodes traversed by queries.
    """

    def __init__(self, inst: Instance):
        self.inst = inst
        self.key = lambda i: efficiency_key(inst.profits[i], inst.weights[i], i)
        self.root = _Node(list(range(inst.n)))
        self.total_weight = sum(inst.weights, Fraction(0))
        self.work = 0
        self.nodes = 0
        self.visits = 0

    def _expand(self, node):
        low, high = median_partition(node.items, self.key)
        self.work += len(node.items)
        self.nodes += 1
        node.low = _Node(low)
        node.high = _Node(high)
        node.w_low = sum((self.inst.weights[i] for i in low), Fraction(0))
        node.p_low = sum((self.inst.profits[i] for i in low), Fraction(0))

    def split(self, capacity):
        """Return ``(split item or None, prefix weight, prefix profit)``."""
        if self.total_weight <= capacity:
            return None, self.total_weight, sum(self.inst.profits, Fraction(0))
        node = self.root
        W = Fraction(0)
        P = Fraction(0)
        while True:
            self.visits += 1
            if len(node.items) == 1:
                return node.items[0], W, P
            if node.low is None:
                self._expand(node)
            if W + node.w_low > capacity:
                node = node.low
            else:
                W += node.w_low
                P += node.p_low
                node = node.high


def lp_relax_fast(inst: Instance) -> FractionalSolution:
    """Same optimum as :func:`lp_relax_baseline` via a shared partition tree."""
    tree = PartitionTree(inst)
    T = inst.T
    x = [[Fraction(0)] * T for _ in range(inst.n)]
    cache = {}
    splits = []
    for t in range(T):
        c = inst.capacities[t]
        if c not in cache:
            cache[c] = tree.split(c)
        s, W, _ = cache[c]
        splits.append(s)
        if s is None:
            for i in range(inst.n):
                x[i][t] = Fraction(1)
            continue
        ks = tree.key(s)
        for i in range(inst.n):
            if tree.key(i) < ks:
                x[i][t] = Fraction(1)
        x[s][t] = (c - W) / inst.weights[s]
    stats = {"splits": splits, "work": tree.work, "nodes": tree.nodes, "visits": tree.visits}
    return _solution(inst, x, inst.capacities, stats)


def work_budget(n: int, T: int, C: int = 4) -> float:
    """Partitioning budget ``C * n * log2 T`` (log clipped below at 1)."""
    return C * n * max(1.0, math.log2(T)) if n else 0


def lemma1_exchange(res: ResidualInstance, x: dict, t: int, j1: int, j2: int) -> Fraction:
    """Shift weight from ``j2`` to the at-least-as-efficient ``j1`` from period ``t`` on.

    ``x`` maps item -> list of per-period fractions and is updated in place.
    Capacity use per period is unchanged.  Returns the objective change,
    which is non-negative.
    """
    inst = res.parent
    w1, w2 = inst.weights[j1], inst.weights[j2]
    p1, p2 = inst.profits[j1], inst.profits[j2]
    if p1 * w2 < p2 * w1:
        raise ValueError("j1 must be at least as efficient as j2")
    k = t - 1
    d = min(w2 * x[j2][k], w1 * (1 - x[j1][k]))
    gain = Fraction(0)
    for tau in range(k, inst.T):
        e = min(d, w1 * (1 - x[j1][tau]))
        if not e:
            continue
        x[j1][tau] += e / w1
        x[j2][tau] -= e / w2
        gain += inst.multipliers[tau] * e * (p1 / w1 - p2 / w2)
    return gain


def new_fractional(x: dict, t: int) -> list:
    """Items first packed in period ``t`` with a fractional value there."""
    k = t - 1
    return [j for j, row in x.items() if 0 < row[k] < 1 and (k == 0 or row[k - 1] == 0)]


def reduce_fractionality(res: ResidualInstance, x: dict) -> int:
    """Apply exchanges period by period until each period opens at most one
    fractional item; returns the number of exchanges made."""
    inst = res.parent
    count = 0
    for t in range(1, inst.T + 1):
        while True:
            fr = new_fractional(x, t)
            if len(fr) < 2:
                break
            fr.sort(key=lambda j: efficiency_key(inst.profits[j], inst.weights[j], j))
            lemma1_exchange(res, x, t, fr[0], fr[-1])
            count += 1
    return count


def check_fractional(frac: FractionalSolution, earliest: Optional[dict] = None) -> None:
    """Exact feasibility check; raises ``AssertionError`` with the violated constraint."""
    inst = frac.instance
    for i, row in enumerate(frac.x):
        for t, v in enumerate(row):
            assert 0 <= v <= 1, f"x[{i}][{t + 1}] = {v} outside [0, 1]"
            assert t == 0 or row[t - 1] <= v, f"item {i} decreases at period {t + 1}"
            if earliest is not None and v:
                assert i in earliest and t + 1 >= earliest[i], \
                    f"item {i} packed before its earliest period"
    for t in range(inst.T):
        assert frac.used[t] <= frac.capacities[t], f"capacity of period {t + 1} exceeded"


def lp_relax_residual(res: ResidualInstance) -> FractionalSolution:
    """Optimal LP relaxation of a residual instance with at most T fractional items."""
    inst = res.parent
    T = inst.T
    cols = [(j, t) for j, tj in res.earliest.items() for t in range(tj, T + 1)]
    index = {jt: k for k, jt in enumerate(cols)}
    c = [inst.multipliers[t - 1] * inst.profits[j] for j, t in cols]
    A = []
    b = []
    for t in range(1, T + 1):
        row = [Fraction(0)] * len(cols)
        for j, tj in res.earliest.items():
            if tj <= t:
                row[index[(j, t)]] = inst.weights[j]
        A.append(row)
        b.append(res.capacities[t - 1])
    for j, tj in res.earliest.items():
        for t in range(tj + 1, T + 1):
            row = [Fraction(0)] * len(cols)
            row[index[(j, t - 1)]] = Fraction(1)
            row[index[(j, t)]] = Fraction(-1)
            A.append(row)
            b.append(Fraction(0))
    if cols:
        lp = solve_lp(c, A, b, [1] * len(cols))
        values, lp_obj, certified = lp.x, lp.objective, lp.certified_from_float
    else:
        values, lp_obj, certified = [], Fraction(0), True

    x = {j: [Fraction(0)] * T for j in res.earliest}
    for k, (j, t) in enumerate(cols):
        x[j][t - 1] = values[k]
    exchanges = reduce_fractionality(res, x)
    full = [x.get(i, [Fraction(0)] * T) for i in range(inst.n)]
    frac = _solution(inst, full, res.capacities,
                     {"exchanges": exchanges, "certified_from_float": certified,
                      "lp_objective": lp_obj})
    check_fractional(frac, res.earliest)
    if frac.objective != lp_obj:
        raise LpNumericalFailure(
            f"post-processed objective {frac.objective} differs from LP optimum {lp_obj}")
    if len(frac.fractional_items()) > T:
        raise LpNumericalFailure("more than T fractional items after post-processing")
    return frac


def round_down(frac: FractionalSolution):
    """Drop every fractional value; returns ``(schedule, value)``."""
    inst = frac.instance
    start = []
    for row in frac.x:
        start.append(next((t + 1 for t, v in enumerate(row) if v == 1), None))
    s = Schedule(start)
    return s, schedule_value(inst, s)
