from fractions import Fraction

import pytest
from hypothesis import given

from ikplab.core import (
    IndexOutOfRange, InfeasibleSchedule, LengthMismatch, NonMonotoneCapacities,
    NonPositiveEntry, RatioReport, Schedule, evaluate, is_feasible, make_instance,
    period_values, period_weights, profit_contribution, schedule_value, to_fraction,
)
from conftest import instances


def test_defaults_and_shape(unit_example):
    assert unit_example.n == 6 and unit_example.T == 3
    assert unit_example.multipliers == (1, 1, 1)
    assert unit_example.tail_multiplier(2) == 2


def test_validation_errors():
    with pytest.raises(NonMonotoneCapacities):
        make_instance([1], [1], [3, 2])
    with pytest.raises(NonPositiveEntry):
        make_instance([1], [0], [3])
    with pytest.raises(NonPositiveEntry):
        make_instance([1], [1], [3], [0])
    with pytest.raises(LengthMismatch):
        make_instance([1, 2], [1], [3])
    with pytest.raises(LengthMismatch):
        make_instance([1], [1], [])


def test_floats_are_refused():
    with pytest.raises(TypeError):
        to_fraction(0.5)
    with pytest.raises(TypeError):
        make_instance([0.5], [1], [1])
    assert to_fraction("3/4") == Fraction(3, 4)


def test_unit_example_values(unit_example):
    s = Schedule([1, 1, 2, 3, 3, 3])
    assert evaluate(unit_example, s) == 11
    assert period_weights(unit_example, s) == [2, 3, 6]
    assert period_values(unit_example, s) == [2, 3, 6]
    assert Schedule([1, 1, None, None, None, None]).packed(3) == [0, 1]


def test_infeasible_and_bad_periods(unit_example):
    assert not is_feasible(unit_example, Schedule([1, 1, 1, None, None, None]))
    with pytest.raises(InfeasibleSchedule):
        evaluate(unit_example, Schedule([4, None, None, None, None, None]))
    with pytest.raises(InfeasibleSchedule):
        evaluate(unit_example, Schedule([1]))
    with pytest.raises(IndexOutOfRange):
        profit_contribution(unit_example, 6, 1)
    with pytest.raises(IndexOutOfRange):
        profit_contribution(unit_example, 0, 4)


def test_empty_schedule_is_zero(unit_example):
    assert evaluate(unit_example, Schedule.empty(6)) == 0


@given(instances())
def test_value_is_sum_of_period_values(inst):
    s = Schedule([1 + (i % inst.T) for i in range(inst.n)])
    assert schedule_value(inst, s) == sum(period_values(inst, s))


def test_ratio_report():
    r = RatioReport.build("x", 6, 11, Fraction(6, 11))
    assert r.achieved_ratio == Fraction(6, 11) and r.guarantee_satisfied
    assert not RatioReport.build("x", 5, 11, Fraction(6, 11)).guarantee_satisfied
    assert RatioReport.build("x", 0, 0).achieved_ratio == 1
