"""The differential [x0, -] of a homogeneous free-mode MC element as a finite
filtered complex.

Restricting to coefficients polynomial in t (degree <= k) and constant in x
is consistent after twisting out the scale factors exp(<alpha, mu>): in the
twisted coordinates the t-derivative picks up the constant shift
<alpha, gamma^0> and every other contribution is t-constant.  The filtration
level is the total s-multidegree |alpha|, along which the matrix is block
lower triangular; the secondary grading is the homological degree.
"""

from __future__ import annotations

from .algebra import FrameAlgebra, get_algebra
from .elements import bracket as l_bracket
from .exterior import mask_degree
from .gauge import GaugeParams, assemble_gauge, mc_residual, residual_is_zero
from .jets import Jet, jet_exp
from .linalg import QQ
from .scalars import RATIONAL
from .specseq import ComplexError, FilteredComplex


class BridgeError(ValueError):
    pass


def homogeneous_kasner_params(u_value, base=(0, 0, 0, 0), field=RATIONAL,
                              order=8) -> GaugeParams:
    """Abelian-frame Kasner data: gamma^0 = (1, -1-u, -1-1/u)/2, all other
    gammas zero, beta_i = d_i, mu_i = t gamma_i^0."""
    from fractions import Fraction

    u = Fraction(u_value) if field == RATIONAL else float(u_value)
    g = {
        1: Fraction(1, 2) if field == RATIONAL else 0.5,
        2: Fraction(-1 - u, 2) if field == RATIONAL else -0.5 * (1 + u),
        3: (Fraction(-1, 2) * (1 + 1 / u)) if field == RATIONAL else -0.5 * (1 + 1.0 / u),
    }
    C = lambda v: Jet.constant(v, base, field, order)  # noqa: E731
    Z = lambda: Jet.zero(base, field, order)  # noqa: E731
    t = Jet.variable("t", base, field, order)
    beta = {i: [Z(), Z(), Z(), Z()] for i in (1, 2, 3)}
    for i in (1, 2, 3):
        beta[i][i] = C(1)
    gamma = {i: [C(g[i]), Z(), Z(), Z(), Z(), Z(), Z()] for i in (1, 2, 3)}
    mu = {i: t * C(g[i]) for i in (1, 2, 3)}
    frame = {i: {k: (C(1) if i == k else Z()) for k in (1, 2, 3)} for i in (1, 2, 3)}
    return GaugeParams(beta, gamma, mu, frame, base, field)


def mc_differential_complex(params: GaugeParams, t_degree: int,
                            algebra: FrameAlgebra = None) -> FilteredComplex:
    """Finite matrix of [x0, -] on the degree-0,1,2 pieces with t-polynomial
    coefficients of degree <= t_degree, filtered by total s-multidegree."""
    algebra = algebra or get_algebra()
    base, field = params.base, params.field
    if field != RATIONAL:
        raise BridgeError("the bridge complex is exact-only; use rational data")
    if base[0] != 0:
        raise BridgeError("the bridge complex needs the base point t0 = 0")
    for i in (1, 2, 3):
        for k in (1, 2, 3):
            fr = params.frame[i][k]
            if (i == k and not (fr - Jet.constant(1, base, field)).is_zero(0.0)) or (
                i != k and not fr.is_zero(0.0)
            ):
                raise BridgeError("the bridge needs the coordinate frame beta_i = d_i")
    x = assemble_gauge(params, "free", algebra)
    res = mc_residual(x, "free", algebra)
    if not residual_is_zero(res, 0.0):
        raise BridgeError("x0 is not Maurer-Cartan in the free mode (d^2 would fail)")

    k = t_degree
    N_jet = k + 3
    gvec = {i: params.gamma[i][0].const_term() for i in (1, 2, 3)}

    def weight_exp(alpha, sign=1):
        w = sum(a * gvec[i + 1] for i, a in enumerate(alpha))
        t = Jet.variable("t", base, field, N_jet)
        return jet_exp(t.scale(sign * w).nonconst(), N_jet)

    # basis: (flat, m) for hdeg 0,1,2 grouped by level |alpha|
    levels = list(range(7))
    basis = {lev: [] for lev in levels}
    for flat, rec in enumerate(algebra.records):
        deg = mask_degree(next(iter(rec.slots))[0])
        if deg > 2:
            continue
        lev = sum(rec.alpha)
        for m in range(k + 1):
            basis[lev].append((flat, m, deg))
    dims = [len(basis[lev]) for lev in levels]
    pos = {}
    for lev in levels:
        for idx, entry in enumerate(basis[lev]):
            pos[entry[:2]] = (lev, idx)

    x_parts = {s: x.element(s) for s in x.parts}
    blocks = {}

    def add_entry(lev_t, row, lev_s, col, val):
        if val == 0:
            return
        blk = blocks.setdefault(
            (lev_t, lev_s),
            [[QQ.zero()] * dims[lev_s] for _ in range(dims[lev_t])],
        )
        blk[row][col] = QQ.add(blk[row][col], QQ.of(val))

    t_jet = Jet.variable("t", base, field, N_jet)
    for lev_s in levels:
        for col, (flat, m, deg) in enumerate(basis[lev_s]):
            beta_alpha = algebra.alpha_of[flat]
            e_beta = algebra.basis_element(flat, base, field)
            coeff = weight_exp(beta_alpha)
            for _ in range(m):
                coeff = coeff * t_jet
            v = e_beta.mul_jet(coeff.truncate(N_jet))
            for sdeg, xel in x_parts.items():
                br = l_bracket(xel, v, algebra.conv)
                if not br.terms:
                    continue
                key = tuple(a + b for a, b in zip(sdeg, beta_alpha))
                span, _ = algebra.decompose_jets(br)
                strip = weight_exp(key, sign=-1)
                for f2, jet in span.items():
                    if algebra.alpha_of[f2] != key:
                        continue
                    if (f2, 0) not in pos:
                        continue  # degree-3 targets live outside the 0,1,2 window
                    poly = jet * strip
                    for idx, val in poly.coeffs.items():
                        if val == 0:
                            continue
                        if any(idx[a] for a in (1, 2, 3)):
                            raise BridgeError("bridge coefficients left the x-constant sector")
                        mm = idx[0]
                        if mm > k:
                            if mm <= N_jet - 1 and val != 0:
                                raise BridgeError(
                                    "twisted coefficients are not polynomial of the stated degree"
                                )
                            continue
                        lev_t, row = pos[(f2, mm)]
                        add_entry(lev_t, row, lev_s, col, val)

    hdeg = []
    for lev in levels:
        for (flat, m, deg) in basis[lev]:
            hdeg.append(deg)
    # drop the rows/cols mapping out of degree <= 2 is automatic (bracket of
    # degree-1 x0 with degree-2 targets lands in degree 3, outside the basis)
    blocks = {
        key: blk
        for key, blk in blocks.items()
        if any(not QQ.is_zero(x) for row in blk for x in row)
    }
    for (i, j) in blocks:
        if i < j:
            raise BridgeError(f"differential is not filtration-compatible: block ({i},{j})")
    try:
        return FilteredComplex(dims, blocks, field=QQ, hdeg=hdeg)
    except ComplexError as e:
        raise BridgeError(f"bridge complex rejected: {e}") from e
