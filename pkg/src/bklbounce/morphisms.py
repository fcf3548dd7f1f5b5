"""Gauge automorphisms: time-affine bundle isomorphisms with identity spatial
map, nilpotent automorphisms generated by degree-0 graded elements, gauge
normalization of over-parametrization data, and the three-step factorization
of the rescaling action.
"""

from __future__ import annotations

from .algebra import FrameAlgebra, get_algebra
from .elements import Element, bracket as l_bracket
from .exterior import DER_AXIS, DERS, SIGMAS, mask_degree, mask_indices
from .gauge import CYCLIC, GaugeError, GaugeParams, SElement, assemble_gauge
from .jets import Jet, compose_t_affine, jet_exp, jet_inv, jet_log
from .scalars import DEFAULT_TOL, FLOAT, RATIONAL, coerce


class MorphismError(ValueError):
    pass


class GroupoidMorphism:
    """(t, x) -> (a(x) t + b(x), x) with coframe scale c(x); a, c > 0.

    a, b, c are t-independent jets at the morphism's spatial base; new_t_base
    is the time base point of the transformed side, which must satisfy
    a(x0) new_t_base + b(x0) = old t base.
    """

    def __init__(self, a: Jet, b: Jet, c: Jet, new_t_base=None):
        if float(a.const_term()) <= 0 or float(c.const_term()) <= 0:
            raise MorphismError("need a > 0 and c > 0 at the base point")
        self.a = a
        self.b = b
        self.c = c
        if new_t_base is None:
            # solve a(x0) t' + b(x0) = t0_old
            t0_old = a.base[0]
            val = (coerce(t0_old, a.field) - b.const_term()) / a.const_term() \
                if a.field == RATIONAL else (float(t0_old) - float(b.const_term())) / float(a.const_term())
            new_t_base = val
        self.new_t_base = new_t_base

    @classmethod
    def identity(cls, base, field, order=None):
        one = Jet.constant(1, base, field, order)
        zero = Jet.zero(base, field, order)
        return cls(one, zero, one, new_t_base=base[0])


def apply_groupoid_morphism(m: GroupoidMorphism, e: Element) -> Element:
    """The induced gLa isomorphism on ambient elements (identity spatial map)."""
    field = e.field
    new_base = (m.new_t_base, e.base[1], e.base[2], e.base[3])
    order = None
    for jet in e.terms.values():
        order = jet.order if order is None else min(
            x for x in (order, jet.order) if x is not None
        ) if (order is not None or jet.order is not None) else None

    def rebase(g: Jet) -> Jet:
        return Jet(new_base, g.order, dict(g.coeffs), field)

    a_n, b_n, c_n = rebase(m.a), rebase(m.b), rebase(m.c)
    ainv = jet_inv(a_n)
    cinv = jet_inv(c_n)
    t_new = Jet.variable("t", new_base, field, order)

    def pullback(f: Jet) -> Jet:
        if all(idx[0] == 0 for idx in f.coeffs):
            return rebase(f)
        return compose_t_affine(f, m.a, m.b, m.new_t_base)

    out = Element.zero(new_base, field)
    for (mask, gen), f in e.terms.items():
        fp = pullback(f)
        k = mask_degree(mask)
        if k:
            for _ in range(k):
                fp = fp * c_n
        if gen in SIGMAS:
            out = out + Element.single(fp, mask, gen)
        elif gen == "d0":
            out = out + Element.single(fp * ainv, mask, "d0")
        else:
            ax = DER_AXIS[gen]
            out = out + Element.single(fp, mask, gen)
            xat_b = a_n.derive(ax) * t_new + b_n.derive(ax)
            out = out + Element.single(-(fp * ainv * xat_b), mask, "d0")
            out = out + Element.single(-(fp * cinv * c_n.derive(ax)), mask, "s0")
    return out.compress()


def apply_groupoid_selement(m: GroupoidMorphism, x: SElement) -> SElement:
    parts = {}
    base_new = x.base
    for sdeg in x.parts:
        el = apply_groupoid_morphism(m, x.element(sdeg))
        span, _ = x.algebra.decompose_jets(el)
        parts[sdeg] = span
        base_new = el.base
    return SElement(parts, x.algebra, base_new, x.field)


class NilpotentGenerator:
    """f s_j s_k sigma_i (kind "boost") or f s_j s_k sigma_jk (kind "rotation"),
    for the cyclic triple at i; more generally any degree-0 element with a
    single nonzero s-multidegree."""

    def __init__(self, kind, i, f: Jet):
        if kind not in ("boost", "rotation"):
            raise MorphismError(f"unknown nilpotent kind {kind!r}")
        self.kind = kind
        self.i = i
        self.f = f
        self.sdeg = tuple(0 if p == i else 1 for p in (1, 2, 3))
        gen = f"s{i}" if kind == "boost" else {1: "s23", 2: "s31", 3: "s12"}[i]
        self.element = Element.single(f, (), gen)


def apply_nilpotent_automorphism(gen: NilpotentGenerator, x: SElement,
                                 algebra: FrameAlgebra = None) -> SElement:
    """exp([gen, -]) on an s-graded element, with the free-mode projection;
    terminates by s-multidegree nilpotency."""
    algebra = algebra or x.algebra
    result = {s: dict(part) for s, part in x.parts.items()}
    frontier = {s: algebra.reconstruct(part, x.base, x.field) for s, part in x.parts.items()}
    n = 1
    while frontier:
        new_frontier = {}
        for sdeg, el in frontier.items():
            br = l_bracket(gen.element, el, algebra.conv)
            if not br.terms:
                continue
            key = tuple(a + b for a, b in zip(gen.sdeg, sdeg))
            span, _ = algebra.decompose_jets(br)
            kept = {fl: j for fl, j in span.items() if algebra.alpha_of[fl] == key}
            kept = {fl: j for fl, j in kept.items() if not j.is_zero(0.0)}
            if kept:
                new_frontier[key] = algebra.reconstruct(kept, x.base, x.field)
                inv_n = coerce(1, x.field) / coerce(n, x.field) if x.field == RATIONAL else 1.0 / n
                tgt = result.setdefault(key, {})
                for fl, j in kept.items():
                    add = j.scale(inv_n)
                    tgt[fl] = add if fl not in tgt else tgt[fl] + add
        # ad^n/n! accumulates: the frontier always carries the scaled term
        frontier = {}
        for key, el in new_frontier.items():
            inv_n = coerce(1, x.field) / coerce(n, x.field) if x.field == RATIONAL else 1.0 / n
            frontier[key] = el.scale(inv_n)
        n += 1
        if n > 8:
            raise MorphismError("nilpotent automorphism failed to terminate")
    return SElement(result, algebra, x.base, x.field)


def reflection(x, sigma: int):
    """Reflection of the spatial coframe elements by sigma; conjugates boosts."""
    if sigma == 1:
        return x

    def map_element(el: Element) -> Element:
        out = Element.zero(el.base, el.field)
        for (mask, gen), f in el.terms.items():
            n_spatial = sum(1 for idx in mask_indices(mask) if idx != 0)
            s = sigma**n_spatial
            if gen in ("s1", "s2", "s3"):
                s *= sigma
            out = out + Element.single(f.scale(s), mask, gen)
        return out

    if isinstance(x, Element):
        return map_element(x)
    parts = {}
    for sdeg in x.parts:
        el = map_element(x.element(sdeg))
        span, _ = x.algebra.decompose_jets(el)
        parts[sdeg] = span
    return SElement(parts, x.algebra, x.base, x.field)


# -- gauge normalization ------------------------------------------------------


def params_from_selement(x: SElement, mu, frame, pair_exp=None, tol=DEFAULT_TOL) -> GaugeParams:
    """Read over-parametrization data back off an affine gauge element."""
    algebra = x.algebra
    base, field = x.base, x.field
    ref = GaugeParams(None, None, mu, frame, base, field, pair_exp=pair_exp)
    g000 = algebra.flats_of_alpha[(0, 0, 0)]
    part0 = x.parts.get((0, 0, 0), {})
    one = Jet.constant(1, base, field)
    d0coeff = part0.get(g000[9])
    if d0coeff is None or not (d0coeff - one).is_zero(tol):
        raise GaugeError("element is not in the affine gauge subspace (theta_0 D_0 slot)")
    gamma = {i: [None] * 7 for i in (1, 2, 3)}
    beta = {}
    zero = Jet.zero(base, field)
    for i, j, k in CYCLIC:
        gamma[i][0] = -(part0.get(g000[4 + i], zero))
        a011 = tuple(0 if p == i else 1 for p in (1, 2, 3))
        a2 = tuple(2 if p == i else 0 for p in (1, 2, 3))
        a211 = tuple(2 if p == i else 1 for p in (1, 2, 3))
        f011 = algebra.flats_of_alpha[a011]
        f2 = algebra.flats_of_alpha[a2]
        f211 = algebra.flats_of_alpha[a211]
        E = ref.exp_pair("jk", i)
        Einv = jet_inv(E)
        part = x.parts.get(a011, {})
        # beta: the theta_i Der slots give sum_m beta^m D_m in coordinates
        b0 = part.get(f011[2], zero) * Einv
        v = {kk: part.get(f011[2 + kk], zero) * Einv for kk in (1, 2, 3)}
        from .gauge import solve3

        M = [[frame[mm][kk] for mm in (1, 2, 3)] for kk in (1, 2, 3)]
        sol = solve3(M, [v[1], v[2], v[3]], base, field)
        beta[i] = [b0, sol[0], sol[1], sol[2]]
    ref.beta = beta
    for i, j, k in CYCLIC:
        a011 = tuple(0 if p == i else 1 for p in (1, 2, 3))
        a2 = tuple(2 if p == i else 0 for p in (1, 2, 3))
        a211 = tuple(2 if p == i else 1 for p in (1, 2, 3))
        f011 = algebra.flats_of_alpha[a011]
        f2 = algebra.flats_of_alpha[a2]
        f211 = algebra.flats_of_alpha[a211]
        E = ref.exp_pair("jk", i)
        Einv = jet_inv(E)
        part = x.parts.get(a011, {})
        mus = mu[1] + mu[2] + mu[3]
        gamma[i][1] = x.parts.get(a2, {}).get(f2[0], zero) * jet_inv(ref.exp_pair("ii", i))
        gamma[i][2] = -(part.get(f011[6], zero) * Einv) - ref.beta_derive(i, mus)
        gamma[i][3] = -(part.get(f011[8], zero) * Einv) + ref.beta_derive(i, mu[k])
        gamma[i][4] = -(part.get(f011[9], zero) * Einv) - ref.beta_derive(i, mu[j])
        gamma[i][5] = -(part.get(f011[7], zero) * Einv)
        gamma[i][6] = x.parts.get(a211, {}).get(f211[0], zero) * jet_inv(ref.exp_pair("iijk", i))
        stray = part.get(f011[10], zero)
        if not stray.is_zero(tol):
            raise GaugeError(f"element leaves the affine gauge subspace (stray slot at {a011})")
    ref.gamma = gamma
    return ref


def gauge_normalize(p: GaugeParams, algebra: FrameAlgebra = None,
                    tol=DEFAULT_TOL) -> GaugeParams:
    """Remove beta_i^0 (and with it gamma_i^6) and gamma_i^5 by nilpotent
    automorphisms; needs the D0(mu_i) = gamma_i^0 hypothesis and
    nondegenerate gamma_j^0 - gamma_k^0 for the rotation step."""
    algebra = algebra or get_algebra()
    base, field = p.base, p.field
    for i in (1, 2, 3):
        hyp = p.mu[i].derive(0) - p.gamma[i][0]
        if not hyp.is_zero(tol):
            raise GaugeError(f"gauge_normalize needs D0(mu_{i}) = gamma_{i}^0")
    x = assemble_gauge(p, "free", algebra)
    for i, j, k in CYCLIC:
        b0 = p.beta[i][0]
        if b0.is_zero(tol):
            continue
        if not b0.derive(0).is_zero(tol):
            raise GaugeError(f"beta_{i}^0 is t-dependent; the removal ODE has no solution")
        f = -(p.exp_pair("jk", i) * b0)
        x = apply_nilpotent_automorphism(NilpotentGenerator("boost", i, f), x, algebra)
    mid = params_from_selement(x, p.mu, p.frame, pair_exp=p.pair_exp, tol=tol)
    for i, j, k in CYCLIC:
        g5 = mid.gamma[i][5]
        if g5.is_zero(tol):
            continue
        denom = mid.gamma[j][0] - mid.gamma[k][0]
        dc = denom.const_term()
        degenerate = (dc == 0) if field == RATIONAL else abs(float(dc)) <= tol
        if degenerate:
            raise GaugeError(
                f"gamma_{j}^0 - gamma_{k}^0 vanishes at the base point; "
                "the gamma^5 alignment step is undefined"
            )
        f = mid.exp_pair("jk", i) * g5 * jet_inv(denom)
        if not f.derive(0).is_zero(tol):
            raise GaugeError(f"gamma_{i}^5 removal needs a t-independent multiplier")
        x = apply_nilpotent_automorphism(NilpotentGenerator("rotation", i, f), x, algebra)
    out = params_from_selement(x, p.mu, p.frame, pair_exp=p.pair_exp, tol=tol)
    return out


def graded_bracket(variant, a, b):
    """Associated-graded bracket of two GradedElements.

    variant "free" keeps, per component pair, the exact sum multidegree;
    "bounce" keeps the (p2, p3) sum with the first index unconstrained;
    "E" is the full bracket.  Returns a GradedElement.
    """
    from .algebra import GradedElement

    algebra = a.algebra
    F_parts_a = a.by_alpha()
    F_parts_b = b.by_alpha()
    out = {}
    for al, pa in F_parts_a.items():
        ea = algebra.reconstruct(pa, a.base, a.field)
        for be, pb in F_parts_b.items():
            eb = algebra.reconstruct(pb, b.base, b.field)
            br = l_bracket(ea, eb, algebra.conv)
            if not br.terms:
                continue
            span, _ = algebra.decompose_jets(br)
            key = tuple(x + y for x, y in zip(al, be))
            for fl, jet in span.items():
                ga = algebra.alpha_of[fl]
                if variant == "free" and ga != key:
                    continue
                if variant == "bounce" and ga[1:] != key[1:]:
                    continue
                out[fl] = jet if fl not in out else out[fl] + jet
    return GradedElement(out, algebra, a.base, a.field)


def scale_factorization_sides(cd, A: Jet, B: Jet, sigma: int, algebra=None):
    """Both sides of the three-step factorization of the rescaling action.

    Left: the gauge element of the rescaled constraint tuple.  Right: the
    composition (groupoid with a = c = A, b = log B) then the three boost
    nilpotents with f_i = exp((A t + log B)(g_j^0 + g_k^0)) D_i(A t + log B),
    then the coframe reflection by sigma, applied to the original element.
    Both sides are jets at the shifted time base where A t' + log B = 0.
    """
    from .bounce import scale_transform
    from .gauge import params_from_constraint_data

    algebra = algebra or get_algebra()
    field = cd.field
    logB = jet_log(B)
    t0_new = (
        -(logB.const_term() / A.const_term())
        if field == FLOAT
        else -(logB.const_term() / A.const_term())
    )
    base_new = (t0_new, *cd.base[1:])

    def rebase_cd(c, new_base):
        from .gauge import ConstraintData

        reb = lambda j: Jet(new_base, j.order, dict(j.coeffs), field)  # noqa: E731
        return ConstraintData(
            {i: reb(c.g0[i]) for i in (1, 2, 3)},
            {i: {k: reb(c.frame[i][k]) for k in (1, 2, 3)} for i in (1, 2, 3)},
            reb(c.xi),
            new_base,
            field,
            c={p: [reb(j) for j in t] for p, t in c.c.items()},
        )

    lhs_cd = rebase_cd(scale_transform(cd, A, B, sigma), base_new)
    lhs = assemble_gauge(params_from_constraint_data(lhs_cd), "free", algebra)

    x = assemble_gauge(params_from_constraint_data(cd), "free", algebra)
    morph = GroupoidMorphism(A, logB, A, new_t_base=t0_new)
    from .morphisms import apply_groupoid_selement  # self-import safe at runtime

    y = apply_groupoid_selement(morph, x)
    reb = lambda j: Jet(base_new, j.order, dict(j.coeffs), field)  # noqa: E731
    t_new = Jet.variable("t", base_new, field, next(iter(cd.g0.values())).order)
    At_logB = reb(A) * t_new + reb(logB)
    g = cd.g0
    cdn = rebase_cd(cd, base_new)
    for i, j, k in ((3, 1, 2), (2, 3, 1), (1, 2, 3)):
        gsum = reb(g[j] + g[k])
        f = jet_exp(At_logB * gsum) * (
            cdn.frame_derive(i, At_logB)
        )
        y = apply_nilpotent_automorphism(NilpotentGenerator("boost", i, f), y, algebra)
    y = reflection(y, sigma)
    return lhs, y


def selement_difference(a: SElement, b: SElement) -> float:
    keys = set(a.parts) | set(b.parts)
    worst = 0.0
    for key in keys:
        pa = a.parts.get(key, {})
        pb = b.parts.get(key, {})
        for fl in set(pa) | set(pb):
            ja, jb = pa.get(fl), pb.get(fl)
            if ja is None:
                worst = max(worst, jb.max_abs())
            elif jb is None:
                worst = max(worst, ja.max_abs())
            else:
                worst = max(worst, (ja - jb).max_abs())
    return worst
