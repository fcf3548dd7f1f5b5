import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bklbounce.jets import (
    Jet,
    JetError,
    compose_t_affine,
    jet_cosh,
    jet_exp,
    jet_inv,
    jet_log,
    jet_pow,
    jet_sech,
    jet_sinh,
    jet_tanh,
)
from bklbounce.scalars import FLOAT, RATIONAL, FieldError

BASE = (0, 0, 0, 0)


def C(v, order=6):
    return Jet.constant(v, BASE, RATIONAL, order)


def V(axis, order=6):
    return Jet.variable(axis, BASE, RATIONAL, order)


def test_add_polynomials():
    t = V("t")
    assert (C(1) + t) + t + t - (C(1) + t.scale(3)) == Jet.zero(BASE, RATIONAL, 6)


def test_mul_telescopes():
    t = V("t", 2)
    left = (C(1, 2) + t) * (C(1, 2) - t)
    assert left == C(1, 2) - t * t


def test_reciprocal_geometric_series_oracle():
    # 1/u for u(0) = 3 via the geometric series sum (-1)^n h^n / 3^(n+1)
    u = C(3) + V("x1").nonconst() + V("x2").nonconst().scale(Fraction(1, 2))
    inv = jet_inv(u)
    h = u - C(3)
    series = Jet.zero(BASE, RATIONAL, 6)
    power = C(1)
    for n in range(7):
        series = series + power.scale(Fraction((-1) ** n, 3 ** (n + 1)))
        power = power * h
    assert (inv - series).is_zero(0.0)
    assert (u * inv - C(1)).is_zero(0.0)


def test_derive_examples():
    t = V("t")
    assert (t * t).derive("t") == t.truncate(5).scale(2)
    x1, x2 = V("x1"), V("x2")
    assert (x1 * x2).derive("x1") == x2.truncate(5)
    th = jet_tanh(Jet.variable("t", BASE, RATIONAL, 3))
    d = th.derive("t")
    expected = C(1, 2) - Jet.variable("t", BASE, RATIONAL, 2) * Jet.variable("t", BASE, RATIONAL, 2)
    assert d == expected


def test_derive_order_zero_raises():
    with pytest.raises(JetError):
        C(1, 0).derive("t")


def test_tanh_series_coefficients():
    th = jet_tanh(Jet.variable("t", BASE, RATIONAL, 3))
    assert th.coeffs == {(1, 0, 0, 0): 1, (3, 0, 0, 0): Fraction(-1, 3)}


def test_tanh_matches_sinh_over_cosh():
    # independent route: tanh = sinh * 1/cosh
    t = Jet.variable("t", BASE, RATIONAL, 8)
    alt = jet_sinh(t) * jet_inv(jet_cosh(t))
    assert (jet_tanh(t) - alt).is_zero(0.0)


def test_sech_tanh_identity():
    a = Jet.from_coeffs(
        {(1, 0, 0, 0): 1, (0, 1, 0, 0): Fraction(2, 3), (2, 0, 0, 0): -1},
        BASE,
        RATIONAL,
        5,
    )
    s, th = jet_sech(a), jet_tanh(a)
    assert (s * s + th * th - C(1, 5)).is_zero(0.0)


def test_exp_series():
    e = jet_exp(Jet.variable("t", BASE, RATIONAL, 4))
    assert e.coeffs[(0, 0, 0, 0)] == 1
    assert e.coeffs[(2, 0, 0, 0)] == Fraction(1, 2)
    assert e.coeffs[(4, 0, 0, 0)] == Fraction(1, 24)


def test_log_domain_error():
    with pytest.raises(JetError):
        jet_log(C(-1))


def test_rational_exactness_guards():
    with pytest.raises(FieldError):
        jet_exp(C(1))
    with pytest.raises(FieldError):
        jet_tanh(C(Fraction(1, 2)))
    # but float succeeds
    f = Jet.constant(1.0, (0.0,) * 4, FLOAT, 4)
    assert abs(jet_exp(f).const_term() - math.e) < 1e-14


def test_pow_rational_and_irrational():
    u = C(4) + V("x1").nonconst()
    r = jet_pow(u, Fraction(1, 2))
    assert r.const_term() == 2
    assert (r * r - u).is_zero(0.0)
    with pytest.raises(FieldError):
        jet_pow(C(2), Fraction(1, 2))


def test_base_point_mismatch():
    a = Jet.constant(1, (0, 0, 0, 0), RATIONAL, 3)
    b = Jet.constant(1, (1, 0, 0, 0), RATIONAL, 3)
    with pytest.raises(JetError):
        a + b


def test_json_roundtrip():
    a = Jet.from_coeffs(
        {(1, 0, 0, 0): Fraction(3, 7), (0, 2, 1, 0): -2}, BASE, RATIONAL, 4
    )
    b = Jet.from_json(a.to_json(), RATIONAL)
    assert (a - b).is_zero(0.0)


def test_compose_t_affine():
    # f(t, x) = t^2 + x1 under t -> 2t + x2 (x2 base 0)
    f = V("t", 4) * V("t", 4) + V("x1", 4)
    a = C(2, 4)
    b = V("x2", 4).nonconst()
    g = compose_t_affine(f, a, b, 0)
    t, x1, x2 = V("t", 4), V("x1", 4), V("x2", 4)
    expected = (t.scale(2) + x2) * (t.scale(2) + x2) + x1
    assert (g - expected).is_zero(0.0)


coeff_strategy = st.dictionaries(
    st.tuples(*[st.integers(0, 2)] * 4).filter(lambda m: sum(m) <= 3),
    st.fractions(min_value=-3, max_value=3),
    max_size=5,
)


@given(coeff_strategy, coeff_strategy)
@settings(max_examples=40, deadline=None)
def test_leibniz_rule(ca, cb):
    a = Jet.from_coeffs(ca, BASE, RATIONAL, 3)
    b = Jet.from_coeffs(cb, BASE, RATIONAL, 3)
    lhs = (a * b).derive("x1")
    rhs = a.derive("x1") * b + a * b.derive("x1")
    assert (lhs - rhs).is_zero(0.0)


@given(coeff_strategy)
@settings(max_examples=30, deadline=None)
def test_partials_commute(ca):
    a = Jet.from_coeffs(ca, BASE, RATIONAL, 3)
    assert (a.derive("x1").derive("x2") - a.derive("x2").derive("x1")).is_zero(0.0)


@given(coeff_strategy)
@settings(max_examples=25, deadline=None)
def test_chain_rule_tanh(ca):
    a = Jet.from_coeffs(ca, BASE, RATIONAL, 3)
    a = a - Jet.constant(a.const_term(), BASE, RATIONAL, 3)  # keep tanh rational
    lhs = jet_tanh(a).derive("x1")
    s = jet_sech(a)
    rhs = s * s * a.derive("x1")
    assert (lhs - rhs).is_zero(0.0)
