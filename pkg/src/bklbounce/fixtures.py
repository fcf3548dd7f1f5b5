"""Shared fixtures: homogeneous Kasner data, germ-data generators, a small
filtered-complex example.

Provenance notes.  The homogeneous normal-form fixture uses the Bianchi-type
frame D1 = d1, D2 = d2, D3 = -2 x2 d1 + d3, whose only structure function is
c_23^1 = -2; its Kasner triple is (1, -1-u, -1-1/u)/2.  The random germ
generator keeps the boundary frame close to that shape so that the
normalization divisions stay well conditioned at jet order 6.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .bounce import NormalFormData
from .gauge import ConstraintData
from .jets import Jet
from .scalars import FLOAT, RATIONAL
from .cksolver import GermData


def homogeneous_normal_form(u_value, base=(0, 0, 0, 0), field=RATIONAL, order=6):
    """Normal-form constraint data with constant u and c_23^1 = -2."""
    if field == RATIONAL:
        u_value = Fraction(u_value)
    C = lambda v: Jet.constant(v, base, field, order)  # noqa: E731
    Z = lambda: Jet.zero(base, field, order)  # noqa: E731
    x2 = Jet.variable("x2", base, field, order).nonconst()
    frame = {
        1: {1: C(1), 2: Z(), 3: Z()},
        2: {1: Z(), 2: C(1), 3: Z()},
        3: {1: x2.scale(-2), 2: Z(), 3: C(1)},
    }
    if field == RATIONAL:
        g0 = {
            1: C(Fraction(1, 2)),
            2: C(Fraction(-1 - u_value, 2) * 1),
            3: C(Fraction(-1, 2) * (1 + 1 / u_value)),
        }
    else:
        g0 = {
            1: C(0.5),
            2: C(-0.5 * (1 + u_value)),
            3: C(-0.5 * (1 + 1.0 / u_value)),
        }
    cd = ConstraintData(g0, frame, Z(), base, field)
    return NormalFormData.from_constraint_data(cd)


def bianchi_homogeneous_normal_form(u_value, b=1, c=4, base=(0, 0, 0, 0),
                                    field=RATIONAL, order=6):
    """Normal-form data whose frame has all three cyclic structure constants
    nonzero: c_23^1 = -2, c_31^2 = b, c_12^3 = c (needed for the bounce map,
    whose frame permutation divides by c_12^3).

    Construction: on the surface x1 = 0 take D2 = d2 + q d3 and
    D3 = gamma d1 + d3 where gamma(x2) solves the Riccati equation
    gamma' = c gamma^2 - 2 with gamma(0) = 0 and q = -c gamma x3; then
    integrate d1 D2 = c D3, d1 D3 = -b D2 in x1.  The remaining structure
    equation [D2, D3] = -2 D1 holds on the surface by the boundary choice and
    propagates by the Jacobi identity.
    """
    from fractions import Fraction as Fr

    if field == RATIONAL:
        u_value, b, c = Fr(u_value), Fr(b), Fr(c)
        half, inv_of = Fr(1, 2), lambda m: Fr(1, m)
    else:
        u_value, b, c = float(u_value), float(b), float(c)
        half, inv_of = 0.5, lambda m: 1.0 / m
    C = lambda v: Jet.constant(v, base, field, order)  # noqa: E731
    Z = lambda: Jet.zero(base, field, order)  # noqa: E731
    x3 = Jet.variable("x3", base, field, order).nonconst()
    # gamma(x2): order-by-order Riccati solve
    gamma = Z()
    for m in range(order):
        rhs = (gamma * gamma).scale(c) - C(2)
        coeff = rhs.axis_coefficients("x2").get(m)
        if coeff is not None:
            gamma = gamma + coeff.scale(inv_of(m + 1)).mul_axis_power("x2", m + 1, order)
    q = -(gamma * x3).scale(c)
    D2 = {1: Z(), 2: C(1), 3: q}
    D3 = {1: gamma, 2: Z(), 3: C(1)}
    for m in range(order):
        incr2 = {k: D3[k].axis_coefficients("x1").get(m) for k in (1, 2, 3)}
        incr3 = {k: D2[k].axis_coefficients("x1").get(m) for k in (1, 2, 3)}
        for k in (1, 2, 3):
            if incr2[k] is not None:
                D2[k] = D2[k] + incr2[k].scale(c * inv_of(m + 1)).mul_axis_power("x1", m + 1, order)
            if incr3[k] is not None:
                D3[k] = D3[k] + incr3[k].scale(-b * inv_of(m + 1)).mul_axis_power("x1", m + 1, order)
    frame = {1: {1: C(1), 2: Z(), 3: Z()}, 2: D2, 3: D3}
    g0 = {
        1: C(half),
        2: C(-(1 + u_value) * half),
        3: C(-(1 + 1 / u_value) * half),
    }
    cd = ConstraintData(g0, frame, Z(), base, field)
    return NormalFormData.from_constraint_data(cd)


def random_boundary_jet(rng, base, field, order, amplitude, zero_const=True,
                        density=0.5):
    """Random 2-variable (x2, x3) jet with small coefficients."""
    coeffs = {}
    for j in range(order + 1):
        for k in range(order + 1 - j):
            if zero_const and j == 0 and k == 0:
                continue
            if rng.random() > density:
                continue
            if field == RATIONAL:
                coeffs[(0, 0, j, k)] = Fraction(
                    rng.randint(-2, 2), rng.randint(1, 4)
                ) * Fraction(amplitude).limit_denominator(16)
            else:
                coeffs[(0, 0, j, k)] = rng.uniform(-amplitude, amplitude)
    return Jet.from_coeffs(coeffs, base, field, order)


def random_full_jet(rng, base, field, order, amplitude, density=0.35):
    """Random 3-variable jet (for the free structure-function germs)."""
    coeffs = {}
    for i in range(order + 1):
        for j in range(order + 1 - i):
            for k in range(order + 1 - i - j):
                if rng.random() > density:
                    continue
                if field == RATIONAL:
                    coeffs[(0, i, j, k)] = Fraction(
                        rng.randint(-2, 2), rng.randint(1, 4)
                    ) * Fraction(amplitude).limit_denominator(16)
                else:
                    coeffs[(0, i, j, k)] = rng.uniform(-amplitude, amplitude)
    return Jet.from_coeffs(coeffs, base, field, order)


def random_germ_data(seed=None, base=(0, 0, 0, 0), field=FLOAT, order=6,
                     amplitude=0.1, u0=None, rng=None) -> GermData:
    """Well-conditioned random boundary data for the constraint solver.

    The boundary frame is a perturbation of D2 = d2, D3 = -2 x2 d1 + d3 with
    D2^1, D3^1 > 0, so the solved c_23^1 stays near -2 and u0 away from the
    excluded values 1/2, 1, 2.
    """
    rng = rng or random.Random(seed)
    C = lambda v: Jet.constant(v, base, field, order)  # noqa: E731
    x2 = Jet.variable("x2", base, field, order).nonconst()
    if u0 is None:
        u0 = rng.choice([Fraction(23, 8), Fraction(8, 3), Fraction(14, 5)])
    if field == FLOAT:
        u0 = float(u0)
    r = lambda zc=True: random_boundary_jet(rng, base, field, order, amplitude, zc)  # noqa: E731
    rf = lambda: random_full_jet(rng, base, field, order, amplitude)  # noqa: E731
    return GermData(
        c31=[rf(), rf(), rf()],
        c12=[rf(), rf(), rf()],
        d2={1: C(1) + r(), 2: C(1) + r(), 3: r()},
        d3={1: C(1) + x2.scale(-2) + r(), 2: r(), 3: C(1) + r()},
        a=r(),
        u=C(u0) + r(),
        xi=r(),
        base=base,
        field=field,
        order=order,
    )


def d20_filtered_complex():
    """Three 1-dim levels, the only block d_20 = (1); see the spectral tests."""
    from .specseq import FilteredComplex

    return FilteredComplex([1, 1, 1], {(2, 0): [[1]]})
