import random
from fractions import Fraction

import pytest

from bklbounce.cksolver import ck_solve
from bklbounce.elements import const_element
from bklbounce.fixtures import homogeneous_normal_form, random_germ_data
from bklbounce.gauge import (
    ConstraintData,
    GaugeError,
    GaugeParams,
    assemble_gauge,
    check_necessary_conditions,
    constraint_residuals,
    derived_gauge_data,
    mc_residual,
    params_from_constraint_data,
    residual_is_zero,
    residuals_all_zero,
)
from bklbounce.jets import Jet
from bklbounce.scalars import RATIONAL

BASE = (0, 0, 0, 0)
N = 4


def C(v, order=N):
    return Jet.constant(v, BASE, RATIONAL, order)


def Z(order=N):
    return Jet.zero(BASE, RATIONAL, order)


def abelian_frame():
    return {i: {k: (C(1) if i == k else Z()) for k in (1, 2, 3)} for i in (1, 2, 3)}


def zero_params():
    beta = {i: [Z(), Z(), Z(), Z()] for i in (1, 2, 3)}
    gamma = {i: [Z()] * 7 for i in (1, 2, 3)}
    mu = {i: Z() for i in (1, 2, 3)}
    return GaugeParams(beta, gamma, mu, abelian_frame(), BASE, RATIONAL)


def test_assemble_beta_only(algebra):
    p = zero_params()
    for i in (1, 2, 3):
        p.beta[i][i] = C(1)
    x = assemble_gauge(p, "free", algebra)
    # theta_0 D_0 + sum s_j s_k theta_i d_i
    el = x.element((0, 0, 0)) - const_element(1, (0,), "d0")
    assert el.compress(0.0).is_zero_in_L(0.0)
    for i, sdeg in ((1, (0, 1, 1)), (2, (1, 0, 1)), (3, (1, 1, 0))):
        el = x.element(sdeg) - const_element(1, (i,), f"d{i}")
        assert el.compress(0.0).is_zero_in_L(0.0)


def test_assemble_gamma0_example(algebra):
    p = zero_params()
    p.gamma[1][0] = C(1)
    x = assemble_gauge(p, "free", algebra)
    want = (
        const_element(1, (0,), "d0")
        - const_element(1, (1,), "s1")
        - const_element(1, (0,), "s0")
    )
    assert (x.total_element() - want).compress(0.0).is_zero_in_L(0.0)


def test_assemble_decomposition_support(algebra):
    rng = random.Random(0)
    p = zero_params()
    for i in (1, 2, 3):
        for a in range(7):
            p.gamma[i][a] = C(Fraction(rng.randint(-2, 2), rng.randint(1, 3)))
        for m in range(4):
            p.beta[i][m] = C(Fraction(rng.randint(-2, 2), 3))
    x = assemble_gauge(p, "free", algebra)
    assert x.rees_violations() == []
    assert x.homological_degrees() == [1]


def test_mce1_examples():
    g = {1: C(Fraction(1, 2)), 2: C(-1), 3: C(-1)}
    cd = ConstraintData(g, abelian_frame(), Z(), BASE, RATIONAL)
    assert constraint_residuals(cd)["mce1"].is_zero(0.0)
    g = {1: C(1), 2: C(-4), 3: C(Fraction(-4, 3))}
    cd = ConstraintData(g, abelian_frame(), Z(), BASE, RATIONAL)
    assert constraint_residuals(cd)["mce1"].is_zero(0.0)
    g = {1: C(1), 2: C(1), 3: C(1)}
    cd = ConstraintData(g, abelian_frame(), Z(), BASE, RATIONAL)
    assert constraint_residuals(cd)["mce1"].const_term() == 3


def test_derived_data_examples():
    # c_23^1 = -2 gives g_1^1 = 1
    nf = homogeneous_normal_form(3, order=N)
    g1 = nf.cd.derived_g()[0]
    assert g1[1].const_term() == 1
    # xi = x1, D = coordinate frame gives g_1^2 = 1
    xi = Jet.variable("x1", BASE, RATIONAL, N).nonconst()
    cd = ConstraintData({1: C(Fraction(1, 2)), 2: C(-1), 3: C(-1)}, abelian_frame(), xi, BASE, RATIONAL)
    _, g2, _, _ = cd.derived_g()
    assert g2[1].const_term() == 1
    # all zero data
    cd = ConstraintData({1: Z(), 2: Z(), 3: Z()}, abelian_frame(), Z(), BASE, RATIONAL)
    for trip in cd.derived_g():
        for i in (1, 2, 3):
            assert trip[i].is_zero(0.0)


def test_mc_residual_trivial(algebra):
    p = zero_params()
    x = assemble_gauge(p, "free", algebra)
    for mode in ("E", "free", "bounce"):
        assert residual_is_zero(mc_residual(x, mode, algebra), 0.0)


def test_sufficiency_forward_and_back(algebra):
    rng = random.Random(21)
    for trial in range(3):
        d = random_germ_data(base=BASE, field=RATIONAL, order=N, rng=rng, amplitude=0.25)
        cd = ck_solve(d)
        assert residuals_all_zero(
            {k: v.truncate(N - 1) for k, v in constraint_residuals(cd).items()}, 0.0
        )
        p = params_from_constraint_data(cd, order=N)
        x = assemble_gauge(p, "free", algebra)
        assert residual_is_zero(mc_residual(x, "free", algebra), 0.0)
        # inject a violation: perturb one g^0; the residual must turn nonzero
        bad = ConstraintData(
            {
                1: cd.g0[1] + C(Fraction(1, 5)),
                2: cd.g0[2],
                3: cd.g0[3],
            },
            cd.frame,
            cd.xi,
            BASE,
            RATIONAL,
            c=cd.c,
        )
        assert not residuals_all_zero(constraint_residuals(bad), 1e-9)
        pb = params_from_constraint_data(bad, order=N)
        xb = assemble_gauge(pb, "free", algebra)
        assert not residual_is_zero(mc_residual(xb, "free", algebra), 1e-9)


def test_violation_located_in_quadratic_degrees(algebra):
    nf = homogeneous_normal_form(3, order=N)
    cd = nf.cd
    bad = ConstraintData(
        {1: cd.g0[1] + C(1), 2: cd.g0[2], 3: cd.g0[3]},
        cd.frame,
        cd.xi,
        BASE,
        RATIONAL,
        c=cd.c,
    )
    xb = assemble_gauge(params_from_constraint_data(bad, order=N), "free", algebra)
    res = mc_residual(xb, "free", algebra)
    assert res
    # the gamma^0 terms carry s-degree zero, so the quadratic constraint
    # failure shows up exactly at multidegree (0,0,0)
    assert set(res) == {(0, 0, 0)}


def test_synchronous_frame_gamma6(algebra):
    nf = homogeneous_normal_form(3, order=N)
    p = params_from_constraint_data(nf.cd, order=N)
    x = assemble_gauge(p, "free", algebra)
    assert residual_is_zero(mc_residual(x, "free", algebra), 0.0)
    # switching on gamma_1^6 with beta^0 = 0 must break MC, with the failure
    # in the s_1^2 s_2 s_3 component proportional to gamma_1^6
    p.gamma[1][6] = C(Fraction(1, 3))
    x6 = assemble_gauge(p, "free", algebra)
    res = mc_residual(x6, "free", algebra)
    assert (2, 1, 1) in res
    comp = res[(2, 1, 1)]
    flats = {algebra.alpha_of[f] for f in comp.coeffs}
    assert flats == {(2, 1, 1)}


def test_homogeneous_remark(algebra):
    # constant gamma^0, gamma^1 with only cyclic c's nonzero is MC iff mce1
    nf = homogeneous_normal_form(Fraction(5, 2), order=N)
    p = params_from_constraint_data(nf.cd, order=N)
    for i in (1, 2, 3):
        for a in (2, 3, 4, 5, 6):
            assert p.gamma[i][a].is_zero(0.0)
    x = assemble_gauge(p, "free", algebra)
    assert residual_is_zero(mc_residual(x, "free", algebra), 0.0)


def test_necessary_conditions_report(algebra):
    nf = homogeneous_normal_form(3, order=N)
    p = params_from_constraint_data(nf.cd, order=N)
    assert check_necessary_conditions(p) == []
    p.gamma[2][3] = Jet.variable("t", BASE, RATIONAL, N)
    rep = check_necessary_conditions(p)
    assert [name for name, _ in rep] == ["gamma_2^3"]
    # violated hypothesis is a distinct error
    p.mu[1] = Z()
    p.gamma[1][0] = C(1)
    with pytest.raises(GaugeError):
        check_necessary_conditions(p)


def test_mc_residual_requires_degree_one(algebra):
    from bklbounce.gauge import SElement

    x = SElement.zero(algebra, BASE, RATIONAL)
    span, _ = algebra.decompose_jets(const_element(1, (), "s1"))
    x.parts[(0, 1, 1)] = span
    with pytest.raises(GaugeError):
        mc_residual(x, "free", algebra)
