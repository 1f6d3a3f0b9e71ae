"""Incremental knapsack model: instances, schedules, feasibility and objective.

Items are indexed from 0.  Periods are numbered 1..T, matching the usual
notation for the time horizon; a start of ``None`` means the item is never
packed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Sequence


class IKPError(Exception):
    """Base class for every error raised by this package."""


class InvalidInstance(IKPError, ValueError):
    pass


class NonMonotoneCapacities(InvalidInstance):
    pass


class NonPositiveEntry(InvalidInstance):
    pass


class LengthMismatch(InvalidInstance):
    pass


class InfeasibleSchedule(IKPError, ValueError):
    pass


class IndexOutOfRange(IKPError, IndexError):
    pass


class BudgetExceeded(IKPError, RuntimeError):
    """A search ran out of budget.  ``result`` holds the best incumbent found."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class AlgorithmPreconditionFailed(IKPError, ValueError):
    pass


class NotWeightConstrained(AlgorithmPreconditionFailed):
    """Some item does not fit the first-period capacity."""


class NotTwoPeriods(AlgorithmPreconditionFailed):
    pass


class ParameterOutOfRange(IKPError, ValueError):
    pass


def to_fraction(value) -> Fraction:
    """Convert an exact number to :class:`Fraction`.

    Floats are refused: every quantity in the model is kept exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}: {value!r}")


def _fractions(values: Iterable) -> tuple:
    return tuple(to_fraction(v) for v in values)


@dataclass(frozen=True)
class Instance:
    profits: tuple
    weights: tuple
    capacities: tuple
    multipliers: tuple

    def __post_init__(self):
        object.__setattr__(self, "profits", _fractions(self.profits))
        object.__setattr__(self, "weights", _fractions(self.weights))
        object.__setattr__(self, "capacities", _fractions(self.capacities))
        object.__setattr__(self, "multipliers", _fractions(self.multipliers))

    @property
    def n(self) -> int:
        return len(self.profits)

    @property
    def T(self) -> int:
        return len(self.capacities)

    def tail_multiplier(self, start: int) -> Fraction:
        """Sum of the multipliers of periods ``start..T``."""
        return sum(self.multipliers[start - 1:], Fraction(0))

    @property
    def is_weight_constrained(self) -> bool:
        """True when every item fits the first-period capacity."""
        return all(w <= self.capacities[0] for w in self.weights)


def validate_instance(inst: Instance) -> Instance:
    if len(inst.profits) != len(inst.weights):
        raise LengthMismatch(
            f"{len(inst.profits)} profits but {len(inst.weights)} weights")
    if len(inst.capacities) != len(inst.multipliers):
        raise LengthMismatch(
            f"{len(inst.capacities)} capacities but {len(inst.multipliers)} multipliers")
    if inst.T == 0:
        raise LengthMismatch("at least one period is required")
    for name in ("profits", "weights", "capacities", "multipliers"):
        for i, v in enumerate(getattr(inst, name)):
            if v <= 0:
                raise NonPositiveEntry(f"{name}[{i}] = {v} is not positive")
    for t in range(1, inst.T):
        if inst.capacities[t - 1] > inst.capacities[t]:
            raise NonMonotoneCapacities(
                f"capacity of period {t} ({inst.capacities[t - 1]}) exceeds "
                f"capacity of period {t + 1} ({inst.capacities[t]})")
    return inst


def make_instance(profits, weights, capacities, multipliers=None) -> Instance:
    """Build and validate an instance; multipliers default to all ones."""
    if multipliers is None:
        multipliers = [1] * len(capacities)
    return validate_instance(Instance(profits, weights, capacities, multipliers))


@dataclass(frozen=True)
class Schedule:
    """Start period per item (1-based period, ``None`` for never)."""

    start: tuple

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(self.start))

    @classmethod
    def empty(cls, n: int) -> "Schedule":
        return cls((None,) * n)

    @classmethod
    def from_periods(cls, n: int, starts: dict) -> "Schedule":
        start = [None] * n
        for i, t in starts.items():
            start[i] = t
        return cls(start)

    def packed(self, t: int) -> list:
        """Items in the knapsack during period ``t``."""
        return [i for i, s in enumerate(self.start) if s is not None and s <= t]

    def x(self, T: int) -> list:
        """0/1 matrix ``x[i][t-1]``."""
        return [[1 if s is not None and s <= t else 0 for t in range(1, T + 1)]
                for s in self.start]


def period_weights(inst: Instance, s: Schedule) -> list:
    used = [Fraction(0)] * inst.T
    for i, st in enumerate(s.start):
        if st is None:
            continue
        for t in range(st - 1, inst.T):
            used[t] += inst.weights[i]
    return used


def check_schedule(inst: Instance, s: Schedule, capacities: Optional[Sequence] = None) -> None:
    """Raise :class:`InfeasibleSchedule` unless ``s`` respects every capacity."""
    if len(s.start) != inst.n:
        raise InfeasibleSchedule(f"schedule has {len(s.start)} entries for {inst.n} items")
    for i, st in enumerate(s.start):
        if st is not None and not (isinstance(st, int) and 1 <= st <= inst.T):
            raise InfeasibleSchedule(f"item {i} has invalid start period {st!r}")
    caps = inst.capacities if capacities is None else capacities
    for t, used in enumerate(period_weights(inst, s), start=1):
        if used > caps[t - 1]:
            raise InfeasibleSchedule(
                f"period {t}: packed weight {used} exceeds capacity {caps[t - 1]}")


def is_feasible(inst: Instance, s: Schedule) -> bool:
    try:
        check_schedule(inst, s)
    except InfeasibleSchedule:
        return False
    return True


def profit_contribution(inst: Instance, item: int, start: int) -> Fraction:
    if not 0 <= item < inst.n:
        raise IndexOutOfRange(f"item {item} not in 0..{inst.n - 1}")
    if not 1 <= start <= inst.T:
        raise IndexOutOfRange(f"period {start} not in 1..{inst.T}")
    return inst.profits[item] * inst.tail_multiplier(start)


def schedule_value(inst: Instance, s: Schedule) -> Fraction:
    """Objective value without the feasibility check."""
    return sum((profit_contribution(inst, i, st) for i, st in enumerate(s.start)
                if st is not None), Fraction(0))


def evaluate(inst: Instance, s: Schedule) -> Fraction:
    check_schedule(inst, s)
    return schedule_value(inst, s)


def period_values(inst: Instance, s: Schedule) -> list:
    """Contribution of each period, ``Δ_t`` times the packed profit."""
    return [inst.multipliers[t - 1] * sum((inst.profits[i] for i in s.packed(t)), Fraction(0))
            for t in range(1, inst.T + 1)]


@dataclass(frozen=True)
class RatioReport:
    algorithm: str
    value: Fraction
    reference_value: Fraction
    achieved_ratio: Fraction
    guaranteed_ratio: Optional[Fraction]
    guarantee_satisfied: bool
    params: dict = field(default_factory=dict)

    @classmethod
    def build(cls, algorithm, value, reference_value, guaranteed_ratio=None, params=None):
        value = to_fraction(value)
        reference_value = to_fraction(reference_value)
        achieved = value / reference_value if reference_value else Fraction(1)
        ok = guaranteed_ratio is None or value >= guaranteed_ratio * reference_value
        return cls(algorithm, value, reference_value, achieved, guaranteed_ratio, ok,
                   dict(params or {}))
