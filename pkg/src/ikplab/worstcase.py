"""Tight instance families, LP duality certificates and ratio sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .algorithms import ALGORITHMS, compute_theta, ht2_guarantee
from .core import IKPError, Instance, ParameterOutOfRange, RatioReport, make_instance, to_fraction
from .oracle import DEFAULT_BUDGET, solve_exact
from .lp import ResidualInstance, validate_residual


class NonRationalMultipliers(ParameterOutOfRange):
    pass


class CertificateViolation(IKPError, AssertionError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def _rational(v, exc=ParameterOutOfRange) -> Fraction:
    try:
        return to_fraction(v)
    except (TypeError, ValueError) as err:
        raise exc(str(err)) from None


# ---------------------------------------------------------------- generators

@dataclass(frozen=True)
class AStarFamily:
    theta: Fraction
    a: int
    b: int
    scale: int
    opt: int
    heights: tuple


def astar_family(multipliers) -> AStarFamily:
    d = [_rational(v, NonRationalMultipliers) for v in multipliers]
    if not d or any(v <= 0 for v in d):
        raise ParameterOutOfRange("multipliers must be positive")
    tails = [sum(d[t:], Fraction(0)) for t in range(len(d))]
    terms = [d[t] / tails[t] for t in range(len(d))]
    b = 1
    for term in terms:
        b = math.lcm(b, term.denominator)
    theta = sum(terms, Fraction(0))
    a = theta * b
    assert a.denominator == 1
    # capacities b/tail_t must be integers; scale OPT when they are not
    scale = 1
    for tail in tails:
        scale = math.lcm(scale, (Fraction(b) / tail).denominator)
    heights = tuple(int(scale * b / tail) for tail in tails)
    return AStarFamily(theta, int(a), b, scale, int(a) * scale, heights)


def gen_tight_astar(multipliers) -> Instance:
    """Unit items whose per-period knapsack values equal the worst-case heights."""
    fam = astar_family(multipliers)
    n = fam.heights[-1]
    return make_instance([1] * n, [1] * n, list(fam.heights), list(multipliers))


def gen_tight_h1(M: int, T: int, multipliers=None, delta=Fraction(1, 1000)) -> Instance:
    M = _rational(M)
    delta = _rational(delta)
    if T < 1 or M <= 2 * (T + 1) or not 0 < delta < 1:
        raise ParameterOutOfRange("need T >= 1, M > 2(T+1) and 0 < delta < 1")
    if multipliers is None:
        multipliers = [1] * T
    half = M / 2
    return make_instance([half + delta, half + T + 1, half - delta],
                         [half, half + T + 1, half],
                         [M + t for t in range(1, T + 1)], multipliers)


def gen_tight_h2(M: int, T: int, multipliers=None) -> Instance:
    M = _rational(M)
    if not (T >= 2 and M > T):
        raise ParameterOutOfRange("need M > T >= 2")
    if multipliers is None:
        multipliers = [1] * T
    profits = [M + T - 1] + [1] * (T - 1) + [M] * T
    weights = [M + T - 1] + [M - 1] * (T - 1) + [M] * T
    caps = [t * M + (T - t) for t in range(1, T + 1)]
    return make_instance(profits, weights, caps, multipliers)


def gen_backward_counterexample(T: int, gamma=Fraction(1, 1000)) -> Instance:
    gamma = _rational(gamma)
    if T < 3 or not 0 < gamma < 1:
        raise ParameterOutOfRange("need T >= 3 and 0 < gamma < 1")
    caps = [4 - gamma] * (T - 2) + [4 + gamma, 5]
    return make_instance([1 + gamma, 1 + gamma, 1, 2], [2, 2, 1, 3 - gamma], caps)


def gen_tight_ht2(d1, d2, gamma=Fraction(1, 1000)) -> Instance:
    d1, d2, gamma = _rational(d1), _rational(d2), _rational(gamma)
    if d1 <= 0 or d2 <= 0 or not 0 < gamma < Fraction(1, 2):
        raise ParameterOutOfRange("need positive multipliers and 0 < gamma < 1/2")
    r = d2 / d1
    if r <= 1:
        if gamma >= 1 + 2 * r:
            raise ParameterOutOfRange("gamma too large for this multiplier ratio")
        profits = [1 + r, 1 + r, r, 1 + 2 * r - gamma, 1]
        weights = [2, 2, 1 + gamma, 3 - 2 * gamma, 1 + 2 * gamma]
    else:
        profits = [1 + 2 * r, 1 + r, 1 + r, r - gamma, 1]
        weights = [3 + gamma, 2, 2, 1, 1]
    return make_instance([p / d1 for p in profits], weights, [3 + gamma, 4], [d1, d2])


def random_instance(seed: int, n: int, T: int, weight_range=(1, 20), profit_range=(1, 20),
                    multiplier_range=(1, 1), weight_constrained=False,
                    fill=(0.3, 1.0)) -> Instance:
    """Integer instance drawn with numpy's PCG64 generator seeded by ``seed``.

    Capacities are nondecreasing fractions ``fill`` of the total weight; with
    ``weight_constrained`` the first capacity is raised to the largest weight.
    """
    rng = np.random.default_rng(seed)
    w = [int(v) for v in rng.integers(weight_range[0], weight_range[1] + 1, size=n)]
    p = [int(v) for v in rng.integers(profit_range[0], profit_range[1] + 1, size=n)]
    d = [int(v) for v in rng.integers(multiplier_range[0], multiplier_range[1] + 1, size=T)]
    total = sum(w)
    lo, hi = fill
    caps = sorted(max(1, int(total * f)) for f in rng.uniform(lo, hi, size=T))
    if weight_constrained:
        caps = [max(c, max(w)) for c in caps]
    return make_instance(p, w, caps, d)


def random_residual(seed: int, n: int, T: int, **kwargs) -> ResidualInstance:
    """Residual instance over :func:`random_instance`.

    Residual capacities are random nondecreasing fractions of the parent's;
    each surviving item gets an earliest period at or after the first period
    where it fits.  Some items are dropped, as a guess would fix them.
    """
    inst = random_instance(seed, n, T, **kwargs)
    rng = np.random.default_rng([seed, 1])
    caps = []
    prev = Fraction(0)
    for c in inst.capacities:
        v = max(prev, Fraction(int(rng.integers(0, 101)), 100) * c)
        v = min(v, c)
        caps.append(v)
        prev = v
    earliest = {}
    for j, w in enumerate(inst.weights):
        fits = [t for t in range(1, T + 1) if caps[t - 1] >= w]
        if not fits or rng.random() < 0.2:
            continue
        earliest[j] = int(rng.integers(fits[0], T + 1))
    return validate_residual(ResidualInstance(inst, caps, earliest))


# --------------------------------------------------------------- certificates

@dataclass(frozen=True)
class CertificateReport:
    primal: dict
    dual: dict
    primal_violation: Fraction
    dual_violation: Fraction
    primal_objective: Fraction
    dual_objective: Fraction
    gap: Fraction
    primal_slacks: dict
    dual_slacks: dict
    complementary: bool

    @property
    def verified(self) -> bool:
        return self.primal_violation == 0 and self.dual_violation == 0 and self.gap == 0

    @property
    def all_tight(self) -> bool:
        return all(v == 0 for v in self.primal_slacks.values()) and \
            all(v == 0 for v in self.dual_slacks.values())


def check_certificate(cost, rows, rhs, primal, dual, col_names, row_names,
                      raise_on_violation=True) -> CertificateReport:
    """Check a primal/dual pair exactly.

    Primal: ``min cost.x  s.t.  rows x >= rhs, x >= 0``.
    Dual:   ``max rhs.y   s.t.  rows^T y <= cost, y >= 0``.
    """
    F = Fraction
    cost = [F(v) for v in cost]
    rows = [[F(v) for v in r] for r in rows]
    rhs = [F(v) for v in rhs]
    x = [F(v) for v in primal]
    y = [F(v) for v in dual]
    pslack = {}
    worst_p = (F(0), None)
    for name, r, b in zip(row_names, rows, rhs):
        s = sum((a * v for a, v in zip(r, x)), F(0)) - b
        pslack[name] = s
        if -s > worst_p[0]:
            worst_p = (-s, name)
    for name, v in zip(col_names, x):
        if -v > worst_p[0]:
            worst_p = (-v, f"{name} >= 0")
    dslack = {}
    worst_d = (F(0), None)
    for j, name in enumerate(col_names):
        s = cost[j] - sum((rows[i][j] * y[i] for i in range(len(rows))), F(0))
        dslack[name] = s
        if -s > worst_d[0]:
            worst_d = (-s, f"dual constraint of {name}")
    for name, v in zip(row_names, y):
        if -v > worst_d[0]:
            worst_d = (-v, f"multiplier of {name} >= 0")
    pobj = sum((c * v for c, v in zip(cost, x)), F(0))
    dobj = sum((b * v for b, v in zip(rhs, y)), F(0))
    comp = all(v * dslack[n] == 0 for n, v in zip(col_names, x)) and \
        all(v * pslack[n] == 0 for n, v in zip(row_names, y))
    report = CertificateReport(dict(zip(col_names, x)), dict(zip(row_names, y)),
                               worst_p[0], worst_d[0], pobj, dobj, pobj - dobj,
                               pslack, dslack, comp)
    if raise_on_violation:
        if worst_p[1] is not None:
            raise CertificateViolation(f"primal constraint {worst_p[1]} violated by {worst_p[0]}", report)
        if worst_d[1] is not None:
            raise CertificateViolation(f"{worst_d[1]} violated by {worst_d[0]}", report)
        if report.gap:
            raise CertificateViolation(f"duality gap {report.gap}", report)
    return report


def astar_worst_case_lp(multipliers, opt):
    """Rows of the worst-case LP of the best-single-period algorithm.

    Columns ``h_A, h_1..h_T``.  The dual constraint of ``h_A`` is
    ``sum_t lambda_t <= 1``.
    """
    d = [to_fraction(v) for v in multipliers]
    T = len(d)
    tails = [sum(d[t:], Fraction(0)) for t in range(T)]
    cols = ["h_A"] + [f"h_{t}" for t in range(1, T + 1)]
    rows, rhs, names = [], [], []
    for t in range(T):
        r = [Fraction(0)] * (T + 1)
        r[0] = Fraction(1)
        r[t + 1] = -tails[t]
        rows.append(r)
        rhs.append(Fraction(0))
        names.append(f"candidate_{t + 1}")
    rows.append([Fraction(0)] + d)
    rhs.append(to_fraction(opt))
    names.append("upper_bound")
    cost = [Fraction(1)] + [Fraction(0)] * T
    return cost, rows, rhs, cols, names


def verify_duality_astar(multipliers, opt) -> CertificateReport:
    d = [_rational(v, NonRationalMultipliers) for v in multipliers]
    opt = _rational(opt)
    if any(v <= 0 for v in d) or opt <= 0:
        raise ParameterOutOfRange("multipliers and OPT must be positive")
    theta = compute_theta(d)
    tails = [sum(d[t:], Fraction(0)) for t in range(len(d))]
    primal = [opt / theta] + [opt / (tail * theta) for tail in tails]
    dual = [d[t] / (tails[t] * theta) for t in range(len(d))] + [1 / theta]
    cost, rows, rhs, cols, names = astar_worst_case_lp(d, opt)
    return check_certificate(cost, rows, rhs, primal, dual, cols, names)


def ht2_worst_case_lp(d1, d2, opt, eps=0):
    """Columns ``h, s_12, s_1, s_2a, s_2', s_2b``; the bound row is scaled by ``1 - eps``."""
    d1, d2, opt, eps = (to_fraction(v) for v in (d1, d2, opt, eps))
    s = d1 + d2
    cols = ["h", "s_12", "s_1", "s_2a", "s_2p", "s_2b"]
    rows = [
        [1, -s, -s, 0, 0, -d2],
        [1, -s, 0, -s, -d2, -d2],
        [1, -d2, 0, -d2, -s, -d2],
        [0, s, d1, d2, d2, d2],
    ]
    rows = [[Fraction(v) for v in r] for r in rows]
    rhs = [Fraction(0)] * 3 + [opt * (1 - eps)]
    names = ["candidate_a", "candidate_b", "candidate_c", "upper_bound"]
    cost = [Fraction(1)] + [Fraction(0)] * 5
    return cost, rows, rhs, cols, names


def verify_duality_ht2(d1, d2, opt, eps=0) -> CertificateReport:
    d1, d2, opt = _rational(d1), _rational(d2), _rational(opt)
    eps = _rational(eps)
    if d1 <= 0 or d2 <= 0 or opt <= 0 or not 0 <= eps < 1:
        raise ParameterOutOfRange("need positive multipliers and OPT, 0 <= eps < 1")
    r = d2 / d1
    den = 1 + 4 * r + 2 * r * r
    scale = 1 - eps
    h = (1 + 3 * r + 2 * r * r) * opt / den
    s1 = r * opt / (d1 * den)
    s12 = (1 + r) * opt / (d1 * den)
    primal = [scale * v for v in (h, s12, s1, 0, s12, 0)]
    dual = [(1 + 2 * r) / den, (1 + r) * r / den, (1 + r) * r / den,
            (1 + 3 * r + 2 * r * r) / den]
    cost, rows, rhs, cols, names = ht2_worst_case_lp(d1, d2, opt, eps)
    return check_certificate(cost, rows, rhs, primal, dual, cols, names)


# ------------------------------------------------------------------- sweeps

def _closed_form_astar(inst, **_):
    return sum((d * c for d, c in zip(inst.multipliers, inst.capacities)), Fraction(0))


def _closed_form_h1(inst, M, **_):
    return to_fraction(M) * sum(inst.multipliers, Fraction(0))


def _closed_form_h2(inst, M, **_):
    return to_fraction(M) * sum((d * t for t, d in enumerate(inst.multipliers, start=1)), Fraction(0))


def _closed_form_backward(inst, T, **_):
    return Fraction(3 * T)


def _closed_form_ht2(inst, d1, d2, gamma, **_):
    r = to_fraction(d2) / to_fraction(d1)
    return 1 + 4 * r + 2 * r * r - (1 + r) * to_fraction(gamma)


FAMILIES = {
    "astar": (lambda deltas: gen_tight_astar(deltas), _closed_form_astar),
    "h1": (lambda M, T, deltas=None, delta=Fraction(1, 1000): gen_tight_h1(M, T, deltas, delta),
           _closed_form_h1),
    "h2": (lambda M, T, deltas=None: gen_tight_h2(M, T, deltas), _closed_form_h2),
    "backward": (lambda T, gamma=Fraction(1, 1000): gen_backward_counterexample(T, gamma),
                 _closed_form_backward),
    "ht2": (lambda d1, d2, gamma=Fraction(1, 1000): gen_tight_ht2(d1, d2, gamma), _closed_form_ht2),
}


def ratio_sweep(family: str, grid: Sequence[dict], algorithm: str, reference: str = "oracle",
                budget: int = DEFAULT_BUDGET, eps=0) -> list:
    """Run ``algorithm`` on every point of ``grid`` for one tight family.

    ``reference`` selects the optimum used for the ratio: ``"oracle"`` runs
    the exact solver, ``"closed-form"`` uses the family's known optimum.
    """
    if family not in FAMILIES:
        raise ParameterOutOfRange(f"unknown family {family!r}")
    gen, closed = FAMILIES[family]
    algo: Callable = ALGORITHMS[algorithm]
    out = []
    for params in grid:
        inst = gen(**params)
        res = algo(inst, eps) if eps else algo(inst)
        if reference == "oracle":
            ref = solve_exact(inst, budget).value
        elif reference == "closed-form":
            ref = closed(inst, **params)
        else:
            raise ValueError(f"unknown reference {reference!r}")
        out.append(RatioReport.build(res.name, res.value, ref, res.guaranteed_ratio, params))
    return out


__all__ = [
    "AStarFamily", "CertificateReport", "CertificateViolation", "FAMILIES",
    "NonRationalMultipliers", "astar_family", "astar_worst_case_lp", "check_certificate",
    "gen_backward_counterexample", "gen_tight_astar", "gen_tight_h1", "gen_tight_h2",
    "gen_tight_ht2", "ht2_guarantee", "ht2_worst_case_lp", "random_instance",
    "random_residual", "ratio_sweep", "verify_duality_astar", "verify_duality_ht2",
]
