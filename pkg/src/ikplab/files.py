"""Instance files and JSON encoding of exact rationals.

An instance file is a JSON object::

    {"format_version": 1,
     "profits": [...], "weights": [...], "capacities": [...], "multipliers": [...],
     "metadata": {...}}

Numbers are JSON integers or ``"p/q"`` strings.  Items are 0-based.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import IKPError, Instance, validate_instance

FORMAT_VERSION = 1
_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")
_DECIMAL = re.compile(r"^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\s*$")


class ParseError(IKPError, ValueError):
    pass


def parse_rational(value) -> Fraction:
    """Integers and ``"p/q"`` strings only; decimals are rejected."""
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str) and _RATIONAL.match(value):
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise ParseError(f"zero denominator in {value!r}") from None
    raise ParseError(f"expected an integer or 'p/q' string, got {value!r}")


def parse_number(value) -> Fraction:
    """Like :func:`parse_rational` but also reads decimal literals exactly."""
    if isinstance(value, str) and _DECIMAL.match(value):
        return Fraction(value.strip())
    return parse_rational(value)


def format_rational(v: Fraction):
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass
class InstanceFile:
    instance: Instance
    metadata: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def to_json(self) -> dict:
        inst = self.instance
        return {
            "format_version": self.format_version,
            "profits": [format_rational(v) for v in inst.profits],
            "weights": [format_rational(v) for v in inst.weights],
            "capacities": [format_rational(v) for v in inst.capacities],
            "multipliers": [format_rational(v) for v in inst.multipliers],
            "metadata": jsonable(self.metadata),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "InstanceFile":
        if not isinstance(data, dict):
            raise ParseError("instance file must hold a JSON object")
        version = data.get("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ParseError(f"unsupported format version {version}")
        try:
            arrays = {k: [parse_rational(v) for v in data[k]]
                      for k in ("profits", "weights", "capacities")}
        except KeyError as err:
            raise ParseError(f"missing key {err.args[0]!r}") from None
        except TypeError:
            raise ParseError("profits, weights and capacities must be arrays") from None
        mult = data.get("multipliers")
        mult = [1] * len(arrays["capacities"]) if mult is None else [parse_rational(v) for v in mult]
        inst = validate_instance(Instance(arrays["profits"], arrays["weights"],
                                          arrays["capacities"], mult))
        return cls(inst, dict(data.get("metadata") or {}), version)

    @classmethod
    def loads(cls, text: str) -> "InstanceFile":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise ParseError(f"invalid JSON: {err}") from None
        return cls.from_json(data)


def read_instance(path) -> InstanceFile:
    return InstanceFile.loads(Path(path).read_text())


def write_instance(path, inst: Instance, metadata=None) -> InstanceFile:
    f = InstanceFile(inst, dict(metadata or {}))
    Path(path).write_text(f.dumps())
    return f


def jsonable(obj):
    """Recursively turn fractions into JSON-friendly integers or strings."""
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "__dataclass_fields__"):
        return {k: jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    return obj
