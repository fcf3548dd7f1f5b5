"""The explicit one-bounce element, normalization, the bounce map, and the
induced u-recursion.

The bounce interpolates between two Kasner regimes through chi = (1+tanh t)/2
and is Maurer-Cartan in the two-index associated graded ("bounce" mode).  At
the base point t0 = 0 with rational data everything below stays in the exact
rational field because only even products of the exp(mu_i) scale factors
enter the assembled element, and those have the closed forms
    exp(2 mu_1) = 1/(2 cosh t)          exp(mu_2 + mu_3) = e^{-t(u+1/u)/2} 2 cosh t
    exp(2 mu_2) = e^{-tu}   2 cosh t    exp(mu_3 + mu_1) = e^{-t/(2u)}
    exp(2 mu_3) = e^{-t/u}  2 cosh t    exp(mu_1 + mu_2) = e^{-tu/2}
"""

from __future__ import annotations

from .gauge import CYCLIC, ConstraintData, GaugeError, GaugeParams
from .jets import (
    Jet,
    jet_cosh,
    jet_exp,
    jet_inv,
    jet_log,
    jet_pow,
    jet_sech,
    jet_tanh,
)
from .scalars import FLOAT, RATIONAL, coerce


class BounceError(ValueError):
    pass


class NormalFormData:
    """Constraint data in normal form: g = (1, -1-u, -1-1/u)/2, c_23^1 = -2."""

    def __init__(self, cd: ConstraintData, u: Jet):
        self.cd = cd
        self.u = u
        self.base = cd.base
        self.field = cd.field

    @classmethod
    def from_constraint_data(cls, cd: ConstraintData, tol=1e-9):
        g1, g2, g3 = cd.g0[1], cd.g0[2], cd.g0[3]
        two_g1 = g1 + g1
        u = -(g2 * jet_inv(g1)) - Jet.constant(1, cd.base, cd.field)
        checks = [
            two_g1 - Jet.constant(1, cd.base, cd.field),
            cd.c_of(2, 3, 1) + Jet.constant(2, cd.base, cd.field),
            g3 + (Jet.constant(1, cd.base, cd.field) + jet_inv(u)).scale(
                coerce(1, cd.field) / coerce(2, cd.field) if cd.field == RATIONAL else 0.5
            ),
        ]
        bad = [c.max_abs() for c in checks if not c.is_zero(0.0 if cd.field == RATIONAL else tol)]
        if bad:
            raise BounceError(f"constraint data is not in normal form (residual {max(bad):.2e})")
        if float(u.const_term()) <= 0:
            raise BounceError("normal form needs u > 0 at the base point")
        return cls(cd, u)

    def derived(self):
        g1, g2, g3, g4 = self.cd.derived_g()
        return {"g1": g1, "g2": g2, "g3": g3, "g4": g4}


def scale_transform(cd: ConstraintData, A: Jet, B: Jet, sigma: int) -> ConstraintData:
    """The rescaling action on constraint tuples; preserves the constraints."""
    if float(A.const_term()) <= 0 or float(B.const_term()) <= 0:
        raise BounceError("scale_transform needs A, B positive at the base point")
    if sigma not in (1, -1):
        raise BounceError("sigma must be +-1")
    g = cd.g0
    logB = jet_log(B)
    logA = jet_log(A)
    expo = {
        1: g[2] + g[3],
        2: g[3] + g[1],
        3: g[1] + g[2],
    }
    new_g = {i: A * g[i] for i in (1, 2, 3)}
    new_frame = {}
    for i in (1, 2, 3):
        fac = (A * jet_exp(expo[i] * logB)).scale(sigma)
        new_frame[i] = {k: fac * cd.frame[i][k] for k in (1, 2, 3)}
    new_xi = cd.xi + logA + (g[1] + g[2] + g[3]) * logB
    return ConstraintData(new_g, new_frame, new_xi, cd.base, cd.field)


def normalize(cd: ConstraintData):
    """Unique (A, B, sigma) taking the tuple to normal form; returns
    (NormalFormData, A, B, sigma)."""
    g1, g2, g3 = cd.g0[1], cd.g0[2], cd.g0[3]
    c231 = cd.c_of(2, 3, 1)
    v1, v2, v3, vc = (float(x.const_term()) for x in (g1, g2, g3, c231))
    if not (v1 > 0 and v2 < 0 and v3 < 0 and vc != 0):
        raise BounceError(
            "normalization undefined: need g1 > 0, g2 < 0, g3 < 0, c_23^1 != 0 "
            f"at the base point (got {v1:.3g}, {v2:.3g}, {v3:.3g}, {vc:.3g})"
        )
    A = jet_inv(g1 + g1)
    sigma = -1 if vc > 0 else 1
    # B ** (2 g1) = -2 / (sigma A c231), a positive jet
    target = jet_inv(A * c231).scale(-2 * sigma)
    B = jet_exp(jet_log(target) * jet_inv(g1 + g1))
    out = scale_transform(cd, A, B, sigma)
    nf = NormalFormData.from_constraint_data(out)
    return nf, A, B, sigma


def future_limit(n: NormalFormData) -> ConstraintData:
    """The outgoing constraint tuple of the bounce (future asymptotics)."""
    cd, u = n.cd, n.u
    base, field = cd.base, cd.field
    uc = float(u.const_term())
    if uc in (0.0,) or abs(uc - 0.5) < 1e-12 or abs(uc - 2.0) < 1e-12:
        raise BounceError("future limit undefined at u in {0, 1/2, 2}")
    one = Jet.constant(1, base, field)
    half = coerce(1, field) / coerce(2, field) if field == RATIONAL else 0.5
    der = n.derived()
    g23, g34 = der["g3"][2], der["g4"][3]
    co2 = (g34 * jet_inv(u - Jet.constant(2, base, field))).scale(-2)
    co3 = (u * g23 * jet_inv(u + u - one)).scale(2)
    new_frame = {
        1: {k: cd.frame[1][k] + co2 * cd.frame[2][k] + co3 * cd.frame[3][k] for k in (1, 2, 3)},
        2: dict(cd.frame[2]),
        3: dict(cd.frame[3]),
    }
    new_g = {
        1: -one.scale(half),
        2: (one - u).scale(half),
        3: (one - jet_inv(u)).scale(half),
    }
    return ConstraintData(new_g, new_frame, cd.xi, base, field)


def bounce_map(n: NormalFormData):
    """One application of the bounce map; returns (NormalFormData, u_next, A, B, sigma)."""
    cd, u = n.cd, n.u
    base, field = cd.base, cd.field
    uc = float(u.const_term())
    for excl, msg in ((1.0, "u = 1"), (0.5, "u = 1/2"), (2.0, "u = 2")):
        if abs(uc - excl) < 1e-12:
            raise BounceError(f"bounce map undefined at {msg}")
    if uc <= 0:
        raise BounceError("bounce map needs u > 0")
    fl = future_limit(n)
    one = Jet.constant(1, base, field)
    half = coerce(1, field) / coerce(2, field) if field == RATIONAL else 0.5
    if uc < 1:
        # permute 1,2,3 -> 3,1,2: new tuple reads (g2, g3, g1; D2, D3, D1~)
        u_next = jet_inv(u) - one
        fac = jet_inv(one - u)
        perm = (2, 3, 1)
    else:
        u_next = u - one
        fac = u * jet_inv(u - one)
        perm = (3, 2, 1)
    new_g = {}
    new_frame = {}
    targets = {
        1: one.scale(half),
        2: -(one + u_next).scale(half),
        3: -(one + jet_inv(u_next)).scale(half),
    }
    for slot, src in enumerate(perm, start=1):
        new_g[slot] = fac * fl.g0[src]
        new_frame[slot] = {k: fac * fl.frame[src][k] for k in (1, 2, 3)}
        diff = new_g[slot] - targets[slot]
        if not diff.is_zero(1e-9 if field == FLOAT else 0.0):
            raise BounceError("bounce map produced an unexpected Kasner triple")
    new_xi = fl.xi + jet_log(fac)
    pre = ConstraintData(new_g, new_frame, new_xi, base, field)
    nf, A, B, sigma = normalize(pre)
    return nf, u_next, A, B, sigma


def kasner_u_orbit(u0, n_steps: int):
    """Iterate u -> u-1 (u>1) or 1/u - 1 (0<u<1); stop at excluded values.

    Returns (values, reason) where reason explains the termination.
    """
    from fractions import Fraction

    u = Fraction(u0) if not isinstance(u0, float) else u0
    if float(u) <= 0:
        raise BounceError("orbit needs u0 > 0")
    vals = [u]
    for _ in range(n_steps):
        uf = float(u)
        for excl, name in ((1.0, "1"), (0.5, "1/2"), (2.0, "2")):
            if abs(uf - excl) < 1e-12:
                return vals, f"excluded value {name}"
        u = (u - 1) if uf > 1 else (1 / u - 1)
        vals.append(u)
    uf = float(vals[-1])
    for excl, name in ((1.0, "1"), (0.5, "1/2"), (2.0, "2")):
        if abs(uf - excl) < 1e-12:
            return vals, f"excluded value {name}"
    return vals, "step limit"


class BounceSolution:
    """Gauge parameters of the explicit bounce, plus the A_1..A_7 data."""

    def __init__(self, params: GaugeParams, aux, chi, normal: NormalFormData):
        self.params = params
        self.aux = aux
        self.chi = chi
        self.normal = normal


def bounce_solution(n: NormalFormData, order=None, full_mu=False) -> BounceSolution:
    """The closed-form bounce element over the given normal-form data.

    The data's base point fixes (t0, x0); jets in t use the same truncation
    order as the spatial data unless `order` overrides it.  By default the
    stored mu jets drop their x-independent additive parts (enough for
    assembly, where beta_i^0 = 0); full_mu=True keeps the honest mu jets,
    which needs the float field away from special base points.
    """
    cd, u = n.cd, n.u
    base, field = cd.base, cd.field
    uc = float(u.const_term())
    if abs(uc - 0.5) < 1e-12 or abs(uc - 2.0) < 1e-12 or uc == 0.0:
        raise BounceError("bounce solution undefined at u in {0, 1/2, 2}")

    der = n.derived()
    N = order if order is not None else next(iter(cd.g0.values())).order
    one = Jet.constant(1, base, field, N)
    two = Jet.constant(2, base, field, N)
    half = coerce(1, field) / coerce(2, field) if field == RATIONAL else 0.5

    t = Jet.variable("t", base, field, N)
    ch = jet_cosh(t)
    sech = jet_sech(t)
    chi = (one + jet_tanh(t)).scale(half)
    uinv = jet_inv(u)
    um2 = u - two  # u - 2
    tum1 = u + u - one  # 2u - 1
    um2_i = jet_inv(um2)
    tum1_i = jet_inv(tum1)

    D = cd.frame_derive
    # g_I^A, named gIA
    g11, g21, g31 = der["g1"][1], der["g1"][2], der["g1"][3]
    g12, g22, g32 = der["g2"][1], der["g2"][2], der["g2"][3]
    g13, g23, g33 = der["g3"][1], der["g3"][2], der["g3"][3]
    g14, g24, g34 = der["g4"][1], der["g4"][2], der["g4"][3]

    A1 = (D(3, g34) + g33 * g34 + g34 * g34) * um2 - D(3, u) * g34
    A2 = (
        u * tum1 * D(2, g23)
        - D(2, u) * g23
        - u * tum1 * (g23 * g23 + g23 * g24)
    )
    A3 = (
        (u * g23 * g32).scale(-2)
        + u * u * g23 * g32
        + g22 * g34
        - (u * g22 * g34).scale(2)
    )
    A4 = (
        (u * D(3, g23)).scale(2)
        - (u * u * D(3, g23)).scale(5)
        + (u * u * u * D(3, g23)).scale(2)
        + (D(3, u) * g23).scale(2)
        - u * D(3, u) * g23
        + (u * g23 * g34).scale(2)
        - (u * u * g23 * g34).scale(5)
        + (u * u * u * g23 * g34).scale(2)
        - g24 * g34
        + (u * g24 * g34).scale(4)
        - (u * u * g24 * g34).scale(4)
    )
    A5 = (
        (D(2, g34)).scale(2)
        - (u * D(2, g34)).scale(5)
        + (u * u * D(2, g34)).scale(2)
        + (u * g23 * g33).scale(4)
        - (u * u * g23 * g33).scale(4)
        + u * u * u * g23 * g33
        + D(2, u) * g34
        - (u * D(2, u) * g34).scale(2)
        - (g23 * g34).scale(2)
        + (u * g23 * g34).scale(5)
        - (u * u * g23 * g34).scale(2)
    )
    u2, u3, u4 = u * u, u * u * u, u * u * u * u
    u2p4 = u2 + u4
    A6 = (
        (u3 * D(1, u)).scale(-4)
        + (u * D(2, D(3, u))).scale(2)
        - (u3 * D(2, D(3, u))).scale(2)
        + u2p4 * D(2, g32)
        + u2p4 * D(2, g34)
        - (D(2, u) * D(3, u)).scale(4)
        + u2p4 * D(3, g22)
        - u2p4 * D(3, g23)
        + (u2p4 * g13).scale(2)
        + (u2p4 * g14).scale(2)
        + (u3 * D(3, u) * g22).scale(2)
        - (u3 * D(3, u) * g23).scale(2)
        - (u3 * D(2, u) * g32).scale(2)
        + u2p4 * g23 * g32
        - u2p4 * g24 * g32
        + (u * D(2, u) * g33).scale(2)
        - (u3 * D(2, u) * g33).scale(2)
        + u2p4 * g22 * g33
        - u2p4 * g23 * g33
        - (u * D(2, u) * g34).scale(2)
        - u2p4 * g22 * g34
        - (u2p4 * g23 * g34).scale(2)
        - u2p4 * g24 * g34
    )
    A7 = (
        (u3 * D(1, u)).scale(2)
        - u * D(2, D(3, u))
        + u3 * D(2, D(3, u))
        + (D(2, u) * D(3, u)).scale(2)
        - u3 * D(3, u) * g22
        + u3 * D(3, u) * g23
        + u3 * D(2, u) * g32
        - u * D(2, u) * g33
        + u3 * D(2, u) * g33
        + u * D(2, u) * g34
    )

    # the gamma table
    zero = Jet.zero(base, field, N)
    gam = {i: [zero] * 7 for i in (1, 2, 3)}
    gam[1][0] = one.scale(half) - chi
    gam[2][0] = -(one + u).scale(half) + chi
    gam[3][0] = -(one + uinv).scale(half) + chi
    gam[1][1] = one
    gam[2][1] = g21 + (A1 * um2_i * um2_i) * chi + (g34 * g34 * um2_i * um2_i).scale(4) * chi * chi
    gam[3][1] = (
        g31
        + (A2 * tum1_i * tum1_i) * chi
        + (u2 * g23 * g23 * tum1_i * tum1_i).scale(4) * chi * chi
    )
    gam[1][2] = g12 + (A3 * um2_i * tum1_i).scale(2) * chi
    gam[2][2] = g22
    gam[3][2] = g32
    gam[1][3] = (
        g13
        - (A4 * um2_i * tum1_i * tum1_i).scale(2) * chi
        - (u * g23 * g34 * um2_i * tum1_i).scale(8) * chi * chi
    )
    gam[2][3] = g23 - (u * g23 * tum1_i).scale(4) * chi
    gam[3][3] = g33 + (g34 * um2_i).scale(4) * chi
    gam[1][4] = (
        g14
        - (A5 * um2_i * um2_i * tum1_i).scale(2) * chi
        - (u * g23 * g34 * um2_i * tum1_i).scale(8) * chi * chi
    )
    gam[2][4] = g24 - (u * g23 * tum1_i).scale(4) * chi
    gam[3][4] = g34 + (g34 * um2_i).scale(4) * chi
    one_pu2 = one + u2
    gam[1][5] = (
        (u * g23 * g34 * um2_i * tum1_i).scale(-4) * chi
        - (A6 * jet_inv((u * one_pu2 * one_pu2).scale(2)))
        + (A7 * jet_inv((u2 * one_pu2).scale(2))) * t
    ) * sech
    gam[2][5] = -(u * g23 * tum1_i).scale(2) * sech
    gam[3][5] = (g34 * um2_i).scale(2) * sech

    beta = {
        1: [
            zero,
            one,
            -(g34 * um2_i).scale(2) * chi,
            (u * g23 * tum1_i).scale(2) * chi,
        ],
        2: [zero, zero, one, zero],
        3: [zero, zero, zero, one],
    }

    # spatialized mu (valid since beta_i^0 = 0): t-only additive parts dropped
    if full_mu:
        half_log_2ch = jet_log(ch.scale(2)).scale(half)
        mu = {
            1: -half_log_2ch,
            2: -(t * u).scale(half) + half_log_2ch,
            3: -(t * uinv).scale(half) + half_log_2ch,
        }
    else:
        mu = {
            1: Jet.zero(base, field, N),
            2: -(t * u).scale(half),
            3: -(t * uinv).scale(half),
        }
    two_ch = ch.scale(2)
    e_mtu = jet_exp(-(t * u))
    e_mtui = jet_exp(-(t * uinv))
    pair_exp = {
        ("ii", 1): jet_inv(two_ch),
        ("ii", 2): e_mtu * two_ch,
        ("ii", 3): e_mtui * two_ch,
        ("jk", 1): jet_exp(-(t * (u + uinv)).scale(half)) * two_ch,
        ("jk", 2): jet_exp(-(t * uinv).scale(half)),
        ("jk", 3): jet_exp(-(t * u).scale(half)),
    }
    # Constant shifts of mu_2, mu_3 rescale the graded parameters s_2, s_3,
    # an automorphism of the two-index associated graded (s_1 is filtered,
    # not graded, so mu_1 must stay put; its exponentials are bounded by 1
    # anyway).  Normalizing to value 1 at the base point keeps the float
    # coefficients O(1) at large |t0|.
    if field == FLOAT:
        v2 = float(pair_exp[("ii", 2)].const_term()) ** 0.5
        v3 = float(pair_exp[("ii", 3)].const_term()) ** 0.5
        for key, fac in (
            (("ii", 2), v2 * v2),
            (("ii", 3), v3 * v3),
            (("jk", 1), v2 * v3),
            (("jk", 2), v3),
            (("jk", 3), v2),
        ):
            pair_exp[key] = pair_exp[key].scale(1.0 / fac)
    pair_exp[("iijk", 1)] = pair_exp[("ii", 1)] * pair_exp[("jk", 1)]
    pair_exp[("iijk", 2)] = pair_exp[("ii", 2)] * pair_exp[("jk", 2)]
    pair_exp[("iijk", 3)] = pair_exp[("ii", 3)] * pair_exp[("jk", 3)]

    frame = {i: {k: cd.frame[i][k] for k in (1, 2, 3)} for i in (1, 2, 3)}
    params = GaugeParams(beta, gam, mu, frame, base, field, pair_exp=pair_exp)
    params.mu_spatialized = not full_mu
    aux = {1: A1, 2: A2, 3: A3, 4: A4, 5: A5, 6: A6, 7: A7}
    return BounceSolution(params, aux, chi, n)


def asymptotic_report(n: NormalFormData, t_value: float, order=6):
    """Constant terms of the bounce gammas at a large-|t| base point, with the
    past (g data) and future (outgoing tuple) reference values."""
    from .scalars import FLOAT

    cd = n.cd
    base = (float(t_value), *(float(b) for b in cd.base[1:]))

    def refloat(j):
        return Jet(base, j.order, {m: float(v) for m, v in j.coeffs.items()}, FLOAT)

    cdf = ConstraintData(
        {i: refloat(cd.g0[i]) for i in (1, 2, 3)},
        {i: {k: refloat(cd.frame[i][k]) for k in (1, 2, 3)} for i in (1, 2, 3)},
        refloat(cd.xi),
        base,
        FLOAT,
        c={p: [refloat(x) for x in t] for p, t in cd.c.items()},
    )
    nf = NormalFormData(cdf, refloat(n.u))
    sol = bounce_solution(nf, order=order)
    der = nf.derived()
    fl = future_limit(nf)
    flder = ConstraintData(
        fl.g0, fl.frame, fl.xi, base, FLOAT
    ).derived_g()
    out = {"t": float(t_value), "gamma": {}, "past": {}, "future": {}}
    for i in (1, 2, 3):
        out["gamma"][i] = [float(sol.params.gamma[i][a].const_term()) for a in range(7)]
        out["past"][i] = [
            float(nf.cd.g0[i].const_term()),
            float(der["g1"][i].const_term()),
            float(der["g2"][i].const_term()),
            float(der["g3"][i].const_term()),
            float(der["g4"][i].const_term()),
        ]
        out["future"][i] = [float(fl.g0[i].const_term())]
    return out
