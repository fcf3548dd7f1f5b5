import math
import random
from fractions import Fraction

import pytest

from bklbounce.bounce import (
    BounceError,
    NormalFormData,
    asymptotic_report,
    bounce_map,
    bounce_solution,
    future_limit,
    kasner_u_orbit,
    normalize,
    scale_transform,
)
from bklbounce.cksolver import ck_solve
from bklbounce.fixtures import (bianchi_homogeneous_normal_form,
    homogeneous_normal_form, random_germ_data)
from bklbounce.gauge import (
    ConstraintData,
    assemble_gauge,
    constraint_residuals,
    mc_residual,
    residual_is_zero,
    residual_max_abs,
    residuals_all_zero,
)
from bklbounce.jets import Jet
from bklbounce.scalars import FLOAT, RATIONAL

BASE = (0, 0, 0, 0)
N = 6


def C(v, order=N):
    return Jet.constant(v, BASE, RATIONAL, order)


def Z(order=N):
    return Jet.zero(BASE, RATIONAL, order)


def abelian_frame():
    return {i: {k: (C(1) if i == k else Z()) for k in (1, 2, 3)} for i in (1, 2, 3)}


def test_normalize_example():
    g = {1: C(1), 2: C(-4), 3: C(Fraction(-4, 3))}
    x2 = Jet.variable("x2", BASE, RATIONAL, N).nonconst()
    frame = {
        1: {1: C(1), 2: Z(), 3: Z()},
        2: {1: Z(), 2: C(1), 3: Z()},
        3: {1: x2.scale(-8), 2: Z(), 3: C(1)},
    }  # c_23^1 = -8
    cd = ConstraintData(g, frame, Z(), BASE, RATIONAL)
    cdf = ConstraintData(
        {i: cd.g0[i].to_float() for i in (1, 2, 3)},
        {i: {k: cd.frame[i][k].to_float() for k in (1, 2, 3)} for i in (1, 2, 3)},
        cd.xi.to_float(),
        (0.0, 0.0, 0.0, 0.0),
        FLOAT,
    )
    nf, A, B, sigma = normalize(cdf)
    assert abs(A.const_term() - 0.5) < 1e-14
    assert abs(nf.u.const_term() - 3.0) < 1e-13
    assert sigma == 1
    assert abs(B.const_term() - 2 ** -0.5) < 1e-14


def test_normalize_idempotent():
    nf = homogeneous_normal_form(3, field=FLOAT)
    nf2, A, B, sigma = normalize(nf.cd)
    assert abs(A.const_term() - 1) < 1e-14
    assert abs(B.const_term() - 1) < 1e-14
    assert sigma == 1
    assert max(
        (nf2.cd.g0[i] - nf.cd.g0[i]).max_abs() for i in (1, 2, 3)
    ) < 1e-12


def test_normalize_sign_precondition():
    g = {1: C(Fraction(-1, 2)), 2: C(-1), 3: C(-1)}
    cd = ConstraintData(g, abelian_frame(), Z(), BASE, RATIONAL)
    with pytest.raises(BounceError):
        normalize(cd)


def test_scale_transform_identity_and_residuals():
    nf = homogeneous_normal_form(3)
    one = C(1)
    out = scale_transform(nf.cd, one, one, 1)
    assert residuals_all_zero(constraint_residuals(out), 0.0)
    for i in (1, 2, 3):
        assert (out.g0[i] - nf.cd.g0[i]).is_zero(0.0)
    # A = 2 doubles the Kasner data and keeps the constraints; the log 2
    # shift of xi forces the float field
    from bklbounce.scalars import FieldError

    with pytest.raises(FieldError):
        scale_transform(nf.cd, C(2), one, 1)
    nff = homogeneous_normal_form(3, field=FLOAT)
    out2f = scale_transform(nff.cd, Jet.constant(2.0, nff.base, FLOAT), Jet.constant(1.0, nff.base, FLOAT), 1)
    assert abs(out2f.g0[1].const_term() - 1.0) < 1e-14
    assert abs(out2f.xi.const_term() - math.log(2)) < 1e-14
    assert max(v.max_abs() for v in constraint_residuals(out2f).values()) < 1e-13
    # sigma = -1 negates the frame and keeps the constraints
    out3 = scale_transform(nf.cd, one, one, -1)
    assert (out3.frame[2][2] + C(1)).is_zero(0.0)
    assert residuals_all_zero(constraint_residuals(out3), 0.0)


def test_bounce_solution_homogeneous_exact(algebra):
    nf = homogeneous_normal_form(3)
    sol = bounce_solution(nf)
    assert sol.params.gamma[1][0].const_term() == 0  # chi(0) = 1/2
    for i in (1, 2, 3):
        assert sol.params.gamma[i][6].is_zero(0.0)
        if i > 1:
            assert sol.params.gamma[i][5].is_zero(0.0)  # homogeneous data
    assert (sol.params.mu[1] - Z()).is_zero(0.0)  # spatialized
    x = assemble_gauge(sol.params, "bounce", algebra)
    assert x.rees_violations() == []
    assert residual_is_zero(mc_residual(x, "bounce", algebra), 0.0)
    assert not residual_is_zero(mc_residual(x, "free", algebra), 1e-6)


def test_bounce_solution_excluded_u():
    nf = homogeneous_normal_form(2, field=FLOAT)
    with pytest.raises(BounceError):
        bounce_solution(nf)


def test_future_limit_homogeneous(algebra):
    nf = homogeneous_normal_form(3)
    fl = future_limit(nf)
    assert [str(fl.g0[i].const_term()) for i in (1, 2, 3)] == ["-1/2", "-1", "1/3"]
    for k in (1, 2, 3):
        assert (fl.frame[1][k] - nf.cd.frame[1][k]).is_zero(0.0)
    assert residuals_all_zero(constraint_residuals(fl), 0.0)


def test_future_limit_excluded():
    nf = homogeneous_normal_form(2, field=FLOAT)
    with pytest.raises(BounceError):
        future_limit(nf)


def test_bounce_map_homogeneous_step():
    # needs all three cyclic structure constants nonzero: the permutation in
    # the map divides by c_12^3
    nf = bianchi_homogeneous_normal_form(Fraction(5, 2), field=FLOAT)
    nf2, u_next, A, B, sigma = bounce_map(nf)
    assert abs(u_next.const_term() - 1.5) < 1e-12
    assert abs(nf2.u.const_term() - 1.5) < 1e-12
    assert max(v.truncate(3).max_abs() for v in constraint_residuals(nf2.cd).values()) < 1e-11
    # the u-step matches the two-branch recursion
    vals, _ = kasner_u_orbit(2.5, 1)
    assert abs(float(vals[1]) - 1.5) < 1e-12


def test_bounce_map_low_branch():
    nf = bianchi_homogeneous_normal_form(Fraction(2, 3), field=FLOAT)
    nf2, u_next, *_ = bounce_map(nf)
    assert abs(u_next.const_term() - 0.5) < 1e-12
    with pytest.raises(BounceError):
        bounce_map(nf2)


def test_bounce_map_inhomogeneous_preserves_constraints(algebra):
    rng = random.Random(6)
    d = random_germ_data(base=(0.0, 0.2, 0.1, -0.3), order=N, rng=rng, amplitude=0.06)
    nf, *_ = normalize(ck_solve(d))
    fl = future_limit(nf)
    assert max(v.truncate(N - 2).max_abs() for v in constraint_residuals(fl).values()) < 1e-11
    nf2, u_next, *_ = bounce_map(nf)
    assert max(v.truncate(N - 3).max_abs() for v in constraint_residuals(nf2.cd).values()) < 1e-10


def test_orbit_examples():
    vals, reason = kasner_u_orbit(Fraction(5, 2), 10)
    assert [str(v) for v in vals] == ["5/2", "3/2", "1/2"]
    assert reason == "excluded value 1/2"
    vals, reason = kasner_u_orbit(4, 10)
    assert [str(v) for v in vals] == ["4", "3", "2"]
    assert reason == "excluded value 2"
    vals, reason = kasner_u_orbit(1, 5)
    assert len(vals) == 1 and reason == "excluded value 1"
    with pytest.raises(BounceError):
        kasner_u_orbit(-1, 3)


def test_asymptotics():
    nf = homogeneous_normal_form(3, field=FLOAT)
    for t, target in ((-20.0, 0.5), (20.0, -0.5)):
        rep = asymptotic_report(nf, t)
        assert abs(rep["gamma"][1][0] - target) <= 1e-15
        for i in (1, 2, 3):
            assert abs(rep["gamma"][i][5]) <= 1e-15
    # past limit recovers the normal-form data in all gamma slots
    rep = asymptotic_report(nf, -20.0)
    for i in (1, 2, 3):
        for a in range(5):
            assert abs(rep["gamma"][i][a] - rep["past"][i][a]) <= 1e-15


def test_gamma5_sech_rate():
    rng = random.Random(14)
    d = random_germ_data(base=(0.0, 0.1, 0.2, -0.1), order=4, rng=rng)
    nf, *_ = normalize(ck_solve(d))
    mags = []
    for t in (2.0, 4.0, 6.0):
        rep = asymptotic_report(nf, t, order=4)
        mags.append(max(abs(rep["gamma"][i][5]) for i in (1, 2, 3)))
    # decay like sech t: successive ratios near e^-2
    for a, b in zip(mags, mags[1:]):
        assert b < a * 0.2


def test_bounce_map_undefined_when_structure_degenerates():
    # the Bianchi-II fixture has c_12^3 = 0, so the permuted tuple has
    # c_23^1 = 0 and the normalization inside the map is undefined
    nf = homogeneous_normal_form(Fraction(5, 2), field=FLOAT)
    with pytest.raises(BounceError):
        bounce_map(nf)
