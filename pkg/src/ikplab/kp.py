"""Single-period 0-1 knapsack services.

Exact dynamic programming over integerized weights, the greedy split
(Dantzig) relaxation, and a profit-scaling approximation scheme.  Item ids
refer back to the parent incremental instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import IKPError, ParameterOutOfRange, to_fraction

DEFAULT_TABLE_LIMIT = 10 ** 7


class CapacityNegative(IKPError, ValueError):
    pass


class ScaleOverflow(IKPError, ValueError):
    pass


class EpsilonOutOfRange(ParameterOutOfRange):
    pass


@dataclass(frozen=True)
class KpInstance:
    profits: tuple
    weights: tuple
    capacity: Fraction
    ids: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "profits", tuple(to_fraction(p) for p in self.profits))
        object.__setattr__(self, "weights", tuple(to_fraction(w) for w in self.weights))
        object.__setattr__(self, "capacity", to_fraction(self.capacity))
        ids = tuple(range(len(self.profits))) if self.ids is None else tuple(self.ids)
        object.__setattr__(self, "ids", ids)
        if not len(self.profits) == len(self.weights) == len(self.ids):
            raise ValueError("profits, weights and ids must have equal length")

    @classmethod
    def from_instance(cls, inst, capacity, items: Optional[Sequence[int]] = None):
        items = range(inst.n) if items is None else sorted(items)
        return cls([inst.profits[i] for i in items], [inst.weights[i] for i in items],
                   capacity, list(items))

    def __len__(self):
        return len(self.profits)


@dataclass(frozen=True)
class KpSolution:
    items: tuple
    profit: Fraction
    weight: Fraction
    exact: bool = True
    epsilon: Optional[Fraction] = None


@dataclass(frozen=True)
class SplitResult:
    order: tuple
    split: Optional[int]
    prefix_profit: Fraction
    prefix_weight: Fraction
    fraction: Fraction
    split_profit: Fraction = Fraction(0)

    @property
    def lp_value(self) -> Fraction:
        return self.prefix_profit + self.fraction * self.split_profit

    @property
    def prefix(self) -> tuple:
        """Ids of the items packed completely by the greedy."""
        if self.split is None:
            return self.order
        return self.order[:self.order.index(self.split)]


def efficiency_key(profit, weight, item_id):
    return (-(profit / weight), item_id)


def efficiency_order(kp: KpInstance) -> tuple:
    """Ids sorted by non-increasing p/w, ties by smaller id."""
    idx = sorted(range(len(kp)), key=lambda k: efficiency_key(kp.profits[k], kp.weights[k], kp.ids[k]))
    return tuple(kp.ids[k] for k in idx)


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


def _solution(kp: KpInstance, ids, exact=True, epsilon=None) -> KpSolution:
    pos = {i: k for k, i in enumerate(kp.ids)}
    ids = tuple(sorted(ids))
    return KpSolution(ids,
                      sum((kp.profits[pos[i]] for i in ids), Fraction(0)),
                      sum((kp.weights[pos[i]] for i in ids), Fraction(0)),
                      exact, epsilon)


def _check_capacity(kp: KpInstance):
    if kp.capacity < 0:
        raise CapacityNegative(f"capacity {kp.capacity} is negative")


def kp_exact(kp: KpInstance, table_limit: int = DEFAULT_TABLE_LIMIT) -> KpSolution:
    """Optimal item set; ties go to the lexicographically smallest id set."""
    _check_capacity(kp)
    order = sorted(range(len(kp)), key=lambda k: kp.ids[k])
    cand = [k for k in order if kp.weights[k] <= kp.capacity]
    if not cand:
        return _solution(kp, ())
    scale = _lcm_den([kp.weights[k] for k in cand] + [kp.capacity])
    cap = int(kp.capacity * scale)
    W = [int(kp.weights[k] * scale) for k in cand]
    pscale = _lcm_den(kp.profits[k] for k in cand)
    P = [int(kp.profits[k] * pscale) for k in cand]
    m = len(cand)
    if (m + 1) * (cap + 1) > table_limit:
        raise ScaleOverflow(
            f"DP table of {m + 1} x {cap + 1} cells exceeds the limit {table_limit}")
    dtype = np.int64 if sum(P) < 2 ** 62 else object

    # best[i][c]: optimal profit of items i.. with capacity c
    best = np.zeros((m + 1, cap + 1), dtype=dtype)
    for i in range(m - 1, -1, -1):
        nxt = best[i + 1]
        row = nxt.copy()
        w = W[i]
        row[w:] = np.maximum(nxt[w:], nxt[:cap + 1 - w] + P[i])
        best[i] = row

    chosen = []
    c = cap
    for i in range(m):
        w = W[i]
        if w <= c and best[i + 1][c - w] + P[i] == best[i][c]:
            chosen.append(kp.ids[cand[i]])
            c -= w
    return _solution(kp, chosen)


def kp_split(kp: KpInstance, order: Optional[Sequence[int]] = None) -> SplitResult:
    """Greedy fill in efficiency order; stops at the first item that does not fit.

    ``fraction`` is the packed share of that split item, in ``[0, 1)``.
    """
    _check_capacity(kp)
    if order is None:
        order = efficiency_order(kp)
    order = tuple(order)
    pos = {i: k for k, i in enumerate(kp.ids)}
    pp = Fraction(0)
    pw = Fraction(0)
    for i in order:
        k = pos[i]
        if pw + kp.weights[k] > kp.capacity:
            frac = (kp.capacity - pw) / kp.weights[k]
            return SplitResult(order, i, pp, pw, frac, kp.profits[k])
        pp += kp.profits[k]
        pw += kp.weights[k]
    return SplitResult(order, None, pp, pw, Fraction(0))


def as_epsilon(eps) -> Fraction:
    if isinstance(eps, float):
        return Fraction(str(eps))
    return to_fraction(eps)


def kp_fptas(kp: KpInstance, eps) -> KpSolution:
    """Profit-scaling scheme: profit at least ``(1 - eps)`` times the optimum."""
    eps = as_epsilon(eps)
    if not 0 < eps < 1:
        raise EpsilonOutOfRange(f"epsilon {eps} not in (0, 1)")
    _check_capacity(kp)
    cand = sorted((k for k in range(len(kp)) if kp.weights[k] <= kp.capacity),
                  key=lambda k: kp.ids[k])
    if not cand:
        return _solution(kp, (), exact=False, epsilon=eps)
    m = len(cand)
    pmax = max(kp.profits[k] for k in cand)
    K = eps * pmax / m
    Q = [math.floor(kp.profits[k] / K) for k in cand]
    scale = _lcm_den([kp.weights[k] for k in cand] + [kp.capacity])
    cap = int(kp.capacity * scale)
    W = [int(kp.weights[k] * scale) for k in cand]
    total = sum(Q)
    inf = sum(W) + cap + 1
    dtype = np.int64 if inf < 2 ** 62 else object

    # minw[i][q]: least weight reaching scaled profit q with the first i items
    minw = np.full((m + 1, total + 1), inf, dtype=dtype)
    minw[0][0] = 0
    for i in range(m):
        prev = minw[i]
        row = prev.copy()
        q = Q[i]
        if q == 0:
            minw[i + 1] = row
            continue
        row[q:] = np.minimum(prev[q:], prev[:total + 1 - q] + W[i])
        minw[i + 1] = row

    feasible = np.nonzero(minw[m] <= cap)[0]
    q = int(feasible.max())
    chosen = []
    for i in range(m, 0, -1):
        if minw[i][q] == minw[i - 1][q]:
            continue
        chosen.append(kp.ids[cand[i - 1]])
        q -= Q[i - 1]
    return _solution(kp, chosen, exact=False, epsilon=eps)
