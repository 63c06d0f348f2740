"""Number handling shared by every module.

Inputs may be ints, floats, :class:`fractions.Fraction` or strings of the form
``"p/q"``.  Rational inputs stay rational through every computation; floats
propagate and switch comparisons to a relative tolerance.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, float, Fraction]

REL_TOL = 1e-9


def parse_number(value: object) -> Number:
    """Parse a JSON scalar into an exact number where possible."""
    if isinstance(value, bool):
        raise ValueError(f"booleans are not numbers: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number: {value!r}")
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse number {value!r}") from exc
    raise ValueError(f"expected a number, got {type(value).__name__}")


def to_json_number(value: Number) -> Union[int, float, str]:
    if isinstance(value, Rational):
        value = Fraction(value)
        if value.denominator == 1:
            return int(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return float(value)


def is_exact(*values: object) -> bool:
    return all(isinstance(v, Rational) for v in values)


def close(a: Number, b: Number, rel: float = REL_TOL) -> bool:
    """Exact equality for rationals, relative tolerance otherwise."""
    if is_exact(a, b):
        return a == b
    scale = max(1.0, abs(float(a)), abs(float(b)))
    return abs(float(a) - float(b)) <= rel * scale


def leq(a: Number, b: Number, rel: float = REL_TOL) -> bool:
    if is_exact(a, b):
        return a <= b
    return a <= b or close(a, b, rel)


def sqrt(value: Number) -> Number:
    """Square root, exact when the argument is a perfect rational square."""
    if isinstance(value, Rational):
        value = Fraction(value)
        if value < 0:
            raise ValueError("square root of a negative number")
        num, den = value.numerator, value.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Fraction(rn, rd)
        return math.sqrt(value)
    return math.sqrt(value)


def as_float(value: Number) -> float:
    return float(value)
