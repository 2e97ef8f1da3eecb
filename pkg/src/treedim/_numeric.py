"""Exponent parsing and high-precision logs of big integers."""
from __future__ import annotations

from fractions import Fraction

import mpmath

DEFAULT_PREC = 128


def as_exponent(r) -> Fraction:
    """Parse a cost exponent (int, float, Fraction or string like "3/4")."""
    if isinstance(r, Fraction):
        value = r
    elif isinstance(r, str):
        value = Fraction(r.strip())
    else:
        value = Fraction(r)
    if value < 0:
        raise ValueError(f"exponent must be >= 0, got {r!r}")
    return value


def to_mpf(q: Fraction | int):
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def ln(n) -> "mpmath.mpf":
    """Natural log of a positive int or Fraction at the current working precision."""
    q = Fraction(n)
    if q <= 0:
        raise ValueError("log of a non-positive number")
    if q.denominator == 1:
        return mpmath.log(mpmath.mpf(q.numerator))
    return mpmath.log(mpmath.mpf(q.numerator)) - mpmath.log(mpmath.mpf(q.denominator))


def mpf_to_str(x) -> str:
    """Decimal string that parses back to the same value at the working precision."""
    digits = int(mpmath.mp.prec * 0.30103) + 3
    return mpmath.nstr(x, digits)
