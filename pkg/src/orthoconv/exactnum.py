"""Shared numeric helpers for mixed exact/floating-point values.

Values carried by step functions and L2 vectors are one of

* ``int`` / ``fractions.Fraction`` -- exact rationals (the fast path),
* ``sympy.Expr`` constants -- exact algebraic numbers such as sqrt(3)/9,
* ``float`` -- when an operation left the exact world.

Arithmetic mixes these freely; the helpers below centralize comparisons,
square roots and (de)serialization so the rest of the package does not
have to care which representation a value happens to use.
"""

from __future__ import annotations

import math
from fractions import Fraction

import sympy

__all__ = [
    "is_exact",
    "exact_sqrt",
    "as_float",
    "num_eq",
    "num_le",
    "num_lt",
    "num_min",
    "num_max",
    "parse_rational",
    "format_rational",
    "value_to_json",
    "value_from_json",
]

_RATIONALS = (int, Fraction)


def is_exact(x) -> bool:
    """True when x is an exact number (rational or closed-form constant)."""
    if isinstance(x, bool):
        return False
    if isinstance(x, _RATIONALS):
        return True
    return isinstance(x, sympy.Expr) and x.is_number and not x.has(sympy.Float)


def _perfect_sqrt(fr: Fraction):
    """Exact rational sqrt of fr, or None when fr is not a perfect square."""
    if fr < 0:
        raise ValueError("square root of negative value")
    pn, pd = math.isqrt(fr.numerator), math.isqrt(fr.denominator)
    if pn * pn == fr.numerator and pd * pd == fr.denominator:
        return Fraction(pn, pd)
    return None


def exact_sqrt(x):
    """Square root preserving exactness.

    Rationals that are perfect squares stay rational; other exact values
    become sympy radicals; floats stay floats.
    """
    if isinstance(x, _RATIONALS) and not isinstance(x, bool):
        fr = Fraction(x)
        p = _perfect_sqrt(fr)
        if p is not None:
            return p
        return sympy.sqrt(sympy.Rational(fr.numerator, fr.denominator))
    if isinstance(x, sympy.Expr):
        return sympy.sqrt(x)
    return math.sqrt(x)


def as_float(x) -> float:
    if isinstance(x, sympy.Expr):
        return float(x.evalf(30))
    return float(x)


def _to_sympy(x):
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


def _sym_sign(d):
    """Sign of an exact sympy constant d: -1, 0 or 1."""
    if d.is_zero:
        return 0
    if d.is_Rational:
        return -1 if d < 0 else 1
    if d.equals(0):
        return 0
    v = d.evalf(50)
    if v > 0:
        return 1
    if v < 0:
        return -1
    # evalf could not separate from zero at 50 digits; treat as zero
    return 0


def _compare(a, b) -> int:
    """Three-way comparison across all supported value types."""
    a_sym = isinstance(a, sympy.Expr)
    b_sym = isinstance(b, sympy.Expr)
    if not a_sym and not b_sym:
        if a == b:
            return 0
        return -1 if a < b else 1
    return _sym_sign(_to_sympy(a) - _to_sympy(b))


def num_eq(a, b) -> bool:
    return _compare(a, b) == 0


def num_le(a, b) -> bool:
    return _compare(a, b) <= 0


def num_lt(a, b) -> bool:
    return _compare(a, b) < 0


def num_min(a, b):
    return a if num_le(a, b) else b


def num_max(a, b):
    return b if num_le(a, b) else a


def parse_rational(s) -> Fraction:
    """Parse 'p/q', decimal strings, ints or floats into an exact Fraction."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, float):
        return Fraction(s)
    txt = str(s).strip()
    return Fraction(txt)


def format_rational(fr: Fraction) -> str:
    fr = Fraction(fr)
    if fr.denominator == 1:
        return str(fr.numerator)
    return "%d/%d" % (fr.numerator, fr.denominator)


def value_to_json(v):
    """JSON encoding of a value; exact values go to strings, floats stay."""
    if isinstance(v, bool):
        return v
    if isinstance(v, _RATIONALS):
        return format_rational(Fraction(v))
    if isinstance(v, sympy.Expr):
        return "sym:" + sympy.srepr(v) if not v.is_Rational else format_rational(
            Fraction(int(v.p), int(v.q)))
    return float(v)


def value_from_json(v):
    if isinstance(v, str):
        if v.startswith("sym:"):
            return sympy.sympify(v[4:])
        return parse_rational(v)
    return v
