"""Scalar fields for jet coefficients.

Two realizations: exact rationals (gmpy2.mpq, Fraction fallback) and
float64 with absolute-tolerance comparison.  Every jet carries a field
tag; mixing fields in one operation is an error.
"""

from __future__ import annotations

import math
from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = Fraction

RATIONAL = "rational"
FLOAT = "float"

DEFAULT_TOL = 1e-10


class FieldError(ValueError):
    """Raised when an operation needs a value outside the scalar field."""


def rational(x) -> object:
    """Coerce x (int, Fraction, str like '3/4', mpq) to an exact rational."""
    if isinstance(x, float):
        if x != int(x):
            raise FieldError(f"refusing to coerce non-integral float {x!r} to rational")
        return _mpq(int(x))
    return _mpq(x)


def coerce(x, field: str):
    if field == RATIONAL:
        return rational(x)
    return float(x)


def is_zero(x, field: str, tol: float = DEFAULT_TOL) -> bool:
    if field == RATIONAL:
        return x == 0
    return abs(x) <= tol


def scalar_to_str(x, field: str) -> str:
    if field == RATIONAL:
        f = Fraction(x.numerator, x.denominator) if not isinstance(x, Fraction) else x
        return str(f)
    return repr(float(x))


def scalar_from_str(s: str, field: str):
    if field == RATIONAL:
        return _mpq(Fraction(s))
    return float(s)


def to_float(x) -> float:
    return float(x)


def nth_root_rational(c, n: int):
    """Exact n-th root of a nonnegative rational, or None if irrational."""
    c = rational(c)
    if c < 0:
        return None
    if c == 0:
        return rational(0)
    num, den = c.numerator, c.denominator
    rn = _iroot(num, n)
    rd = _iroot(den, n)
    if rn is None or rd is None:
        return None
    return _mpq(rn, rd)


def _iroot(m: int, n: int):
    if m == 0:
        return 0
    r = round(m ** (1.0 / n))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**n == m:
            return cand
    # float seed can be off for big ints; bisect
    lo, hi = 0, max(2, int(m))
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**n < m:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**n == m else None


def rational_pow(c, r):
    """c**r for rational c and rational exponent r; None when irrational."""
    c = rational(c)
    r = Fraction(r.numerator, r.denominator) if not isinstance(r, Fraction) else r
    if r.denominator == 1:
        e = r.numerator
        if c == 0:
            if e < 0:
                raise ZeroDivisionError("0 ** negative")
            return rational(0) if e else rational(1)
        return c**e
    if c < 0:
        return None
    root = nth_root_rational(c, r.denominator)
    if root is None:
        return None
    return root**r.numerator


def float_pow(c: float, r) -> float:
    return math.pow(c, float(r))
