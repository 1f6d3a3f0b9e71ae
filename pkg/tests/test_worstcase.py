from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ikplab.algorithms import alg_a, compute_theta, h1, h2, h2_backward, ht2, ht2_guarantee
from ikplab.core import ParameterOutOfRange, evaluate
from ikplab.oracle import solve_exact
from ikplab.worstcase import (
    CertificateViolation, NonRationalMultipliers, astar_family, astar_worst_case_lp,
    check_certificate, gen_backward_counterexample, gen_tight_astar, gen_tight_h1,
    gen_tight_h2, gen_tight_ht2, random_instance, random_residual, ratio_sweep,
    verify_duality_astar, verify_duality_ht2,
)

D = Fraction(1, 1000)


def test_astar_family_unit():
    inst = gen_tight_astar([1, 1, 1])
    assert inst.n == 6 and inst.capacities == (2, 3, 6)
    assert solve_exact(inst).value == 11 and alg_a(inst).value == 6


def test_astar_family_small():
    inst = gen_tight_astar([1])
    assert inst.n == 1 and inst.capacities == (1,)
    inst = gen_tight_astar([1, 1])
    assert inst.capacities == (1, 2) and inst.n == 2
    assert alg_a(inst).value / solve_exact(inst).value == Fraction(2, 3)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4))
def test_astar_family_is_tight(deltas):
    inst = gen_tight_astar(deltas)
    ratio = alg_a(inst).value / solve_exact(inst).value
    assert ratio == 1 / compute_theta(deltas)


def test_astar_rejects_floats():
    with pytest.raises(NonRationalMultipliers):
        astar_family([1.5, 1])


def test_h1_family():
    inst = gen_tight_h1(100, 2, None, D)
    assert h1(inst).value / solve_exact(inst).value == Fraction(53, 100)
    inst = gen_tight_h1(10**6, 3)
    assert abs(h1(inst).value / (10**6 * 3) - Fraction(1, 2)) < Fraction(1, 10**5)


def test_h1_optimum_ignores_multipliers():
    for deltas in ([1, 1], [1, 5], [3, 1]):
        inst = gen_tight_h1(100, 2, deltas, D)
        res = solve_exact(inst)
        assert res.schedule.start == (1, None, 1)


def test_h2_family():
    inst = gen_tight_h2(100, 2)
    assert h2(inst).value == 203 and solve_exact(inst).value == 300
    inst = gen_tight_h2(10**5, 3)
    assert abs(h2(inst).value / (10**5 * 6) - Fraction(1, 2)) < Fraction(1, 10**4)


def test_h2_worst_multipliers_tend_to_one_over_T():
    e = Fraction(1, 1000)
    inst = gen_tight_h2(10**4, 4, [e, e, e, 1])
    ratio = h2(inst).value / solve_exact(inst).value
    assert abs(ratio - Fraction(1, 4)) < Fraction(1, 100)


def test_backward_family():
    g = D
    inst = gen_backward_counterexample(10, g)
    assert h2_backward(inst).value == (1 + g) * 10 + 3 + 2 * g
    assert solve_exact(inst).value == 30
    for T in range(3, 51):
        ratio = h2_backward(gen_backward_counterexample(T, g)).value / (3 * T)
        assert (ratio < Fraction(1, 2)) == (T >= 7)
        assert ratio > Fraction(1, 3)


def test_ht2_family():
    inst = gen_tight_ht2(1, 1, Fraction(1, 100))
    assert ht2(inst).value == 6 and solve_exact(inst).value == 7 - 2 * Fraction(1, 100)
    r = Fraction(70711, 100000)
    inst = gen_tight_ht2(1, r, D)
    ratio = ht2(inst).value / solve_exact(inst).value
    assert abs(float(ratio) - (0.5 + 2 ** 0.5 / 4)) < 1e-2
    inst = gen_tight_ht2(1, 2, D)
    assert abs(ht2(inst).value / solve_exact(inst).value - Fraction(15, 17)) < Fraction(1, 100)


def test_generator_parameter_checks():
    with pytest.raises(ParameterOutOfRange):
        gen_tight_h2(2, 3)
    with pytest.raises(ParameterOutOfRange):
        gen_backward_counterexample(2)
    with pytest.raises(ParameterOutOfRange):
        gen_tight_ht2(1, 1, Fraction(1, 2))


def test_random_is_deterministic():
    a = random_instance(7, 10, 4, multiplier_range=(1, 5), weight_constrained=True)
    assert a == random_instance(7, 10, 4, multiplier_range=(1, 5), weight_constrained=True)
    assert a != random_instance(8, 10, 4, multiplier_range=(1, 5), weight_constrained=True)
    assert a.is_weight_constrained
    assert random_residual(3, 6, 3) == random_residual(3, 6, 3)


def test_duality_astar_example():
    rep = verify_duality_astar([1, 1, 1], 11)
    assert rep.verified and rep.gap == 0
    assert rep.primal == {"h_A": 6, "h_1": 2, "h_2": 3, "h_3": 6}
    lam = list(rep.dual.values())
    assert lam == [Fraction(2, 11), Fraction(3, 11), Fraction(6, 11), Fraction(6, 11)]
    # the dual constraint of h_A, sum of lambda_t <= 1, holds with equality
    assert rep.dual_slacks["h_A"] == 0
    one = verify_duality_astar([1], 1)
    assert list(one.primal.values()) == [1, 1] and list(one.dual.values()) == [1, 1]


@settings(max_examples=30)
@given(st.lists(st.fractions(min_value=Fraction(1, 20), max_value=20, max_denominator=30),
                min_size=1, max_size=6), st.integers(1, 50))
def test_duality_astar_random(deltas, opt):
    rep = verify_duality_astar(deltas, opt)
    assert rep.verified and rep.primal_objective == opt / compute_theta(deltas)


def test_duality_ht2():
    rep = verify_duality_ht2(1, 1, 7)
    assert rep.verified and rep.primal["h"] == 6
    assert list(rep.dual.values()) == [Fraction(3, 7), Fraction(2, 7), Fraction(2, 7), Fraction(6, 7)]
    for k in range(1, 101):
        r = Fraction(k, 10)
        rep = verify_duality_ht2(1, r, 1)
        assert rep.verified and rep.primal_objective == ht2_guarantee(1, r)
    rep = verify_duality_ht2(1, 1, 1, Fraction(1, 10))
    assert rep.verified and rep.primal_objective == Fraction(6, 7) * Fraction(9, 10)


def test_certificate_violation_is_reported():
    cost, rows, rhs, cols, names = astar_worst_case_lp([1, 1], 3)
    bad_primal = [Fraction(2), Fraction(1), Fraction(1)]
    dual = [Fraction(1, 3), Fraction(1, 3), Fraction(2, 3)]
    with pytest.raises(CertificateViolation) as info:
        check_certificate(cost, rows, rhs, bad_primal, dual, cols, names)
    assert info.value.report.primal_violation > 0
    rep = check_certificate(cost, rows, rhs, bad_primal, dual, cols, names, raise_on_violation=False)
    assert not rep.verified


def test_ratio_sweeps():
    (rep,) = ratio_sweep("astar", [{"deltas": [1, 1, 1]}], "astar")
    assert rep.achieved_ratio == rep.guaranteed_ratio == Fraction(6, 11)
    (rep,) = ratio_sweep("h1", [{"M": 10**6, "T": 2}], "h1", reference="closed-form")
    assert abs(rep.achieved_ratio - Fraction(1, 2)) < Fraction(1, 10**5)
    gammas = [Fraction(1, 10**k) for k in range(1, 6)]
    reps = ratio_sweep("ht2", [{"d1": 1, "d2": 1, "gamma": g} for g in gammas], "ht2")
    ratios = [r.achieved_ratio for r in reps]
    assert ratios == sorted(ratios, reverse=True) and abs(ratios[-1] - Fraction(6, 7)) < Fraction(1, 10**4)
    for inst_rep in reps:
        assert inst_rep.guarantee_satisfied
    with pytest.raises(ParameterOutOfRange):
        ratio_sweep("nope", [{}], "astar")
