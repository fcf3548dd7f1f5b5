"""Truncated multivariate Taylor series (jets) in the variables (t, x1, x2, x3).

A Jet is attached to a single base point and truncated at a total order N;
order None means the jet is an exact polynomial (no truncation).  Products
and compositions carry order = min of the operand orders.  Coefficients live
in one of the two scalar fields of `scalars`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .scalars import (
    DEFAULT_TOL,
    FLOAT,
    RATIONAL,
    FieldError,
    coerce,
    is_zero,
    rational,
    rational_pow,
    scalar_from_str,
    scalar_to_str,
)

NVARS = 4
AXES = {"t": 0, "x1": 1, "x2": 2, "x3": 3}
DEFAULT_ORDER = 6

ZERO_IDX = (0, 0, 0, 0)


class JetError(ValueError):
    pass


@lru_cache(maxsize=None)
def _indices(order: int):
    """All 4-variable multi-indices of total degree <= order, graded-lex."""
    out = []
    for d in range(order + 1):
        for i in range(d, -1, -1):
            for j in range(d - i, -1, -1):
                for k in range(d - i - j, -1, -1):
                    out.append((i, j, k, d - i - j - k))
    return tuple(out)


@lru_cache(maxsize=None)
def _index_pos(order: int):
    return {m: i for i, m in enumerate(_indices(order))}


@lru_cache(maxsize=None)
def _mul_table(order: int):
    idx = _indices(order)
    pos = _index_pos(order)
    I, J, K = [], [], []
    for ia, ma in enumerate(idx):
        da = sum(ma)
        for ib, mb in enumerate(idx):
            if da + sum(mb) > order:
                continue
            I.append(ia)
            J.append(ib)
            K.append(pos[(ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3])])
    return np.asarray(I), np.asarray(J), np.asarray(K)


def _min_order(na, nb):
    if na is None:
        return nb
    if nb is None:
        return na
    return min(na, nb)


class Jet:
    """Immutable by convention; do not mutate `coeffs` after construction."""

    __slots__ = ("base", "order", "coeffs", "field")

    def __init__(self, base, order, coeffs, field):
        self.base = tuple(base)
        self.order = order
        self.coeffs = coeffs
        self.field = field

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value, base, field, order=None):
        v = coerce(value, field)
        coeffs = {} if is_zero(v, field, 0.0 if field == RATIONAL else 0.0) else {ZERO_IDX: v}
        return cls(base, order, coeffs, field)

    @classmethod
    def zero(cls, base, field, order=None):
        return cls(base, order, {}, field)

    @classmethod
    def variable(cls, axis, base, field, order=None):
        """The coordinate function itself: base value plus the increment."""
        a = AXES[axis] if isinstance(axis, str) else axis
        e = tuple(1 if i == a else 0 for i in range(NVARS))
        coeffs = {e: coerce(1, field)}
        b = coerce(base[a], field)
        if not is_zero(b, field, 0.0):
            coeffs[ZERO_IDX] = b
        return cls(base, order, coeffs, field)

    @classmethod
    def from_coeffs(cls, mapping, base, field, order=None):
        coeffs = {}
        for m, v in mapping.items():
            m = tuple(m)
            if len(m) != NVARS or any(i < 0 for i in m):
                raise JetError(f"bad multi-index {m}")
            if order is not None and sum(m) > order:
                raise JetError(f"index {m} exceeds order {order}")
            v = coerce(v, field)
            if not is_zero(v, field, 0.0):
                coeffs[m] = v
        return cls(base, order, coeffs, field)

    # -- bookkeeping -------------------------------------------------------

    def _check_compat(self, other):
        if self.field != other.field:
            raise JetError(f"field mismatch: {self.field} vs {other.field}")
        if self.field == RATIONAL:
            if self.base != other.base:
                raise JetError(f"base point mismatch: {self.base} vs {other.base}")
        else:
            if any(abs(float(a) - float(b)) > 1e-12 for a, b in zip(self.base, other.base)):
                raise JetError(f"base point mismatch: {self.base} vs {other.base}")

    def const_term(self):
        return self.coeffs.get(ZERO_IDX, coerce(0, self.field))

    def is_zero(self, tol=DEFAULT_TOL):
        return all(is_zero(v, self.field, tol) for v in self.coeffs.values())

    def max_abs(self) -> float:
        return max((abs(float(v)) for v in self.coeffs.values()), default=0.0)

    def truncate(self, order):
        if order is None or (self.order is not None and self.order <= order):
            return self
        coeffs = {m: v for m, v in self.coeffs.items() if sum(m) <= order}
        return Jet(self.base, order, coeffs, self.field)

    def to_float(self):
        if self.field == FLOAT:
            return self
        coeffs = {m: float(v) for m, v in self.coeffs.items()}
        return Jet(tuple(float(b) for b in self.base), self.order, coeffs, FLOAT)

    # -- linear ops --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(other, self.base, self.field)
        self._check_compat(other)
        n = _min_order(self.order, other.order)
        coeffs = dict(self.coeffs) if n is None else {m: v for m, v in self.coeffs.items() if sum(m) <= n}
        for m, v in other.coeffs.items():
            if n is not None and sum(m) > n:
                continue
            w = coeffs.get(m)
            if w is None:
                coeffs[m] = v
            else:
                s = w + v
                if is_zero(s, self.field, 0.0):
                    del coeffs[m]
                else:
                    coeffs[m] = s
        return Jet(self.base, n, coeffs, self.field)

    def __neg__(self):
        return Jet(self.base, self.order, {m: -v for m, v in self.coeffs.items()}, self.field)

    def __sub__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(other, self.base, self.field)
        return self + (-other)

    def scale(self, s):
        s = coerce(s, self.field)
        if is_zero(s, self.field, 0.0):
            return Jet(self.base, self.order, {}, self.field)
        return Jet(self.base, self.order, {m: v * s for m, v in self.coeffs.items()}, self.field)

    # -- multiplication ----------------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check_compat(other)
        n = _min_order(self.order, other.order)
        if not self.coeffs or not other.coeffs:
            return Jet(self.base, n, {}, self.field)
        if self.field == FLOAT and n is not None and n <= 12:
            return self._mul_dense(other, n)
        return self._mul_dict(other, n)

    __rmul__ = scale

    def _mul_dict(self, other, n):
        coeffs = {}
        bi = list(other.coeffs.items())
        for ma, va in self.coeffs.items():
            da = sum(ma)
            if n is not None and da > n:
                continue
            for mb, vb in bi:
                if n is not None and da + sum(mb) > n:
                    continue
                m = (ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3])
                w = coeffs.get(m)
                coeffs[m] = va * vb if w is None else w + va * vb
        if self.field == RATIONAL:
            coeffs = {m: v for m, v in coeffs.items() if v != 0}
        return Jet(self.base, n, coeffs, self.field)

    def _mul_dense(self, other, n):
        pos = _index_pos(n)
        size = len(pos)
        a = np.zeros(size)
        for m, v in self.coeffs.items():
            if sum(m) <= n:
                a[pos[m]] = v
        b = np.zeros(size)
        for m, v in other.coeffs.items():
            if sum(m) <= n:
                b[pos[m]] = v
        I, J, K = _mul_table(n)
        c = np.bincount(K, weights=a[I] * b[J], minlength=size)
        idx = _indices(n)
        coeffs = {idx[i]: c[i] for i in np.nonzero(c)[0]}
        return Jet(self.base, n, coeffs, FLOAT)

    # -- calculus ----------------------------------------------------------

    def derive(self, axis):
        """Exact formal derivative; result order drops by one."""
        a = AXES[axis] if isinstance(axis, str) else axis
        if self.order == 0:
            raise JetError("cannot derive an order-0 jet")
        n = None if self.order is None else self.order - 1
        coeffs = {}
        for m, v in self.coeffs.items():
            if m[a] == 0:
                continue
            mm = list(m)
            mm[a] -= 1
            coeffs[tuple(mm)] = v * m[a]
        return Jet(self.base, n, coeffs, self.field)

    def nonconst(self):
        coeffs = {m: v for m, v in self.coeffs.items() if m != ZERO_IDX}
        return Jet(self.base, self.order, coeffs, self.field)

    def axis_coefficients(self, axis):
        """Split sum_k f_k * (axis-increment)^k; returns {k: jet without axis}."""
        a = AXES[axis] if isinstance(axis, str) else axis
        out = {}
        for m, v in self.coeffs.items():
            k = m[a]
            mm = list(m)
            mm[a] = 0
            out.setdefault(k, {})[tuple(mm)] = v
        n = self.order
        return {
            k: Jet(self.base, None if n is None else n - k, d, self.field)
            for k, d in sorted(out.items())
        }

    def mul_axis_power(self, axis, k, order=None):
        """Multiply by (axis-increment)^k, truncating at `order` if given."""
        a = AXES[axis] if isinstance(axis, str) else axis
        n = order if order is not None else (None if self.order is None else self.order + k)
        coeffs = {}
        for m, v in self.coeffs.items():
            mm = list(m)
            mm[a] += k
            if n is not None and sum(mm) > n:
                continue
            coeffs[tuple(mm)] = v
        return Jet(self.base, n, coeffs, self.field)

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "base": [scalar_to_str(coerce(b, self.field), self.field) for b in self.base],
            "order": self.order,
            "coeffs": {
                "({},{},{},{})".format(*m): scalar_to_str(v, self.field)
                for m, v in sorted(self.coeffs.items())
            },
        }

    @classmethod
    def from_json(cls, obj, field):
        base = tuple(scalar_from_str(str(b), field) for b in obj["base"])
        coeffs = {}
        for key, val in obj.get("coeffs", {}).items():
            m = tuple(int(p) for p in key.strip("()").split(","))
            coeffs[m] = scalar_from_str(str(val), field)
        return cls.from_coeffs(coeffs, base, field, obj.get("order"))

    def __repr__(self):
        items = ", ".join(f"{m}:{v}" for m, v in sorted(self.coeffs.items())[:6])
        more = "..." if len(self.coeffs) > 6 else ""
        return f"Jet(order={self.order}, {{{items}{more}}})"

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (self - other).is_zero(0.0 if self.field == RATIONAL else DEFAULT_TOL)

    __hash__ = None


# -- elementary function composition ---------------------------------------


def _univariate_series(name, c, n, field, exponent=None):
    """Taylor coefficients T[0..n] of f at c, f(c+h) = sum T_k h^k."""
    one = coerce(1, field)

    def frac(p, q):
        return coerce(p, field) / coerce(q, field) if field == RATIONAL else p / q

    if name == "exp":
        if field == RATIONAL:
            if c != 0:
                raise FieldError("rational exp needs constant term 0")
            e0 = one
        else:
            e0 = math.exp(c)
        T = [e0]
        for k in range(1, n + 1):
            T.append(T[-1] / coerce(k, field))
        return T
    if name == "log":
        if c <= 0:
            raise JetError("log of non-positive constant term")
        if field == RATIONAL:
            if c != 1:
                raise FieldError("rational log needs constant term 1")
            l0 = coerce(0, field)
        else:
            l0 = math.log(c)
        T = [l0]
        for k in range(1, n + 1):
            T.append((-one if k % 2 == 0 else one) / (coerce(k, field) * c**k))
        return T
    if name == "tanh" or name == "sech":
        if field == RATIONAL:
            if c != 0:
                raise FieldError("rational tanh/sech needs constant term 0")
            t0, s0 = coerce(0, field), one
        else:
            t0, s0 = math.tanh(c), 1.0 / math.cosh(c)
        T, S = [t0], [s0]
        for k in range(n):
            # T' = S^2, S' = -S*T
            s2 = sum(S[i] * S[k - i] for i in range(k + 1))
            st = sum(S[i] * T[k - i] for i in range(k + 1))
            T.append(s2 / coerce(k + 1, field))
            S.append(-st / coerce(k + 1, field))
        return T if name == "tanh" else S
    if name == "cosh" or name == "sinh":
        if field == RATIONAL:
            if c != 0:
                raise FieldError("rational cosh/sinh needs constant term 0")
            C, Sh = [one], [coerce(0, field)]
        else:
            C, Sh = [math.cosh(c)], [math.sinh(c)]
        for k in range(n):
            C.append(Sh[k] / coerce(k + 1, field))
            Sh.append(C[k] / coerce(k + 1, field))
        return C if name == "cosh" else Sh
    if name == "cos" or name == "sin":
        if field == RATIONAL:
            if c != 0:
                raise FieldError("rational cos/sin needs constant term 0")
            Co, Si = [one], [coerce(0, field)]
        else:
            Co, Si = [math.cos(c)], [math.sin(c)]
        for k in range(n):
            Co.append(-Si[k] / coerce(k + 1, field))
            Si.append(Co[k] / coerce(k + 1, field))
        return Co if name == "cos" else Si
    if name == "pow":
        r = exponent
        if c == 0:
            raise JetError("pow needs nonzero constant term")
        if field == RATIONAL:
            r = Fraction(r) if not isinstance(r, Fraction) else r
            if c < 0 and r.denominator != 1:
                raise JetError("fractional power of negative constant term")
            c0 = rational_pow(c, r)
            if c0 is None:
                raise FieldError(f"{c}**{r} is irrational; use the float field")
            rr = rational(r.numerator) / rational(r.denominator)
        else:
            if c < 0:
                if float(r) != int(r):
                    raise JetError("fractional power of negative constant term")
                c0 = float(c) ** int(r)
            else:
                c0 = math.pow(c, float(r))
            rr = float(r)
        T = [c0]
        for k in range(1, n + 1):
            T.append(T[-1] * (rr - coerce(k - 1, field)) / (coerce(k, field) * c))
        return T
    raise JetError(f"unknown elementary function {name!r}")


def apply_elementary(name, a: Jet, order=None, exponent=None) -> Jet:
    """Compose the univariate series of `name` at a's constant term with a."""
    n = a.order if a.order is not None else order
    if n is None:
        n = DEFAULT_ORDER
    a = a.truncate(n)
    c = a.const_term()
    T = _univariate_series(name, c, n, a.field, exponent=exponent)
    h = a.nonconst()
    out = Jet.constant(T[n], a.base, a.field, n)
    for k in range(n - 1, -1, -1):
        out = out * h + Jet.constant(T[k], a.base, a.field, n)
    return out


def jet_exp(a, order=None):
    return apply_elementary("exp", a, order)


def jet_log(a, order=None):
    return apply_elementary("log", a, order)


def jet_tanh(a, order=None):
    return apply_elementary("tanh", a, order)


def jet_sech(a, order=None):
    return apply_elementary("sech", a, order)


def jet_cosh(a, order=None):
    return apply_elementary("cosh", a, order)


def jet_sinh(a, order=None):
    return apply_elementary("sinh", a, order)


def jet_cos(a, order=None):
    return apply_elementary("cos", a, order)


def jet_sin(a, order=None):
    return apply_elementary("sin", a, order)


def jet_pow(a, r, order=None):
    return apply_elementary("pow", a, order, exponent=r)


def jet_inv(a, order=None):
    """1/a, requiring nonzero constant term (the paper-style division)."""
    return jet_pow(a, -1, order)


def compose_t_affine(f: Jet, a: Jet, b: Jet, new_t_base) -> Jet:
    """Pull back f along (t, x) -> (a(x)*t + b(x), x).

    a, b must be t-independent jets at the spatial base of f; the result is a
    jet at base (new_t_base, x0) and it is required that
    a(x0)*new_t_base + b(x0) equals f's t-base.
    """
    if any(m[0] != 0 for m in a.coeffs) or any(m[0] != 0 for m in b.coeffs):
        raise JetError("a and b must not depend on t")
    field = f.field
    tf = coerce(f.base[0], field)
    t0n = coerce(new_t_base, field)
    val = a.const_term() * t0n + b.const_term() - tf
    if not is_zero(val, field, 1e-9 if field == FLOAT else 0.0):
        raise JetError("base-point mismatch under the affine time map")
    new_base = (new_t_base, f.base[1], f.base[2], f.base[3])
    n = f.order if f.order is not None else DEFAULT_ORDER
    reb = lambda g: Jet(new_base, g.order, dict(g.coeffs), field)  # noqa: E731
    a_n, b_n = reb(a), reb(b)
    dt = Jet.variable("t", new_base, field, None) - Jet.constant(t0n, new_base, field)
    # w = (t - tf) after substitution; zero constant term by the check above
    w = (a_n * dt + a_n.scale(t0n) + b_n - Jet.constant(tf, new_base, field)).truncate(n)
    tcoeffs = f.axis_coefficients("t")
    kmax = max(tcoeffs, default=0)
    out = Jet.zero(new_base, field, n)
    for k in range(kmax, -1, -1):
        fk = tcoeffs.get(k)
        fk = Jet.zero(new_base, field, n) if fk is None else reb(fk).truncate(n)
        out = out * w + fk
    return out
