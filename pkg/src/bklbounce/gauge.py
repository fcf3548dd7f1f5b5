"""Gauge-subspace elements, constraint data, and Maurer-Cartan residuals.

The affine gauge subspace theta_0 D_0 + U_G^1 is parametrized by functions
beta_i^mu, gamma_i^a (a = 0..6), mu_i and a spatial frame D_1, D_2, D_3.
Elements are stored per s-multidegree as coefficient vectors over the table
basis; the three bracket semantics ("E", "free", "bounce") differ only in
which multidegree components of [x, x] are kept.
"""

from __future__ import annotations

from .algebra import FrameAlgebra, GradedElement, get_algebra
from .elements import Element, bracket as l_bracket
from .jets import Jet, jet_exp, jet_inv
from .scalars import DEFAULT_TOL, RATIONAL

CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))
CYCLIC_PAIRS = ((2, 3), (3, 1), (1, 2))

MODES = ("E", "free", "bounce")


def _alpha_e(i, two=False):
    """s-multidegree e_j + e_k (or 2 e_i) for the cyclic triple at i."""
    if two:
        return tuple(2 if p == i else 0 for p in (1, 2, 3))
    return tuple(0 if p == i else 1 for p in (1, 2, 3))


class SElement:
    """Sum over s-multidegrees of basis-coefficient vectors (dict flat -> Jet)."""

    __slots__ = ("parts", "algebra", "base", "field")

    def __init__(self, parts, algebra, base, field):
        self.parts = parts
        self.algebra = algebra
        self.base = tuple(base)
        self.field = field

    @classmethod
    def zero(cls, algebra, base, field):
        return cls({}, algebra, base, field)

    def add_term(self, sdeg, flat, jet):
        part = self.parts.setdefault(tuple(sdeg), {})
        part[flat] = jet if flat not in part else part[flat] + jet

    def graded(self, sdeg) -> GradedElement:
        return GradedElement(self.parts.get(tuple(sdeg), {}), self.algebra, self.base, self.field)

    def element(self, sdeg) -> Element:
        return self.algebra.reconstruct(self.parts.get(tuple(sdeg), {}), self.base, self.field)

    def total_element(self) -> Element:
        el = Element.zero(self.base, self.field)
        for part in self.parts.values():
            el = el + self.algebra.reconstruct(part, self.base, self.field)
        return el

    def homological_degrees(self):
        degs = set()
        for part in self.parts.values():
            for flat, jet in part.items():
                if not jet.is_zero(0.0):
                    el = self.algebra.basis_element(flat, self.base, self.field)
                    degs.update(el.degrees())
        return sorted(degs)

    def rees_violations(self, tol=DEFAULT_TOL):
        """Terms whose graded support exceeds the stored s-multidegree."""
        bad = []
        for sdeg, part in self.parts.items():
            for flat, jet in part.items():
                if jet.is_zero(tol):
                    continue
                alpha = self.algebra.alpha_of[flat]
                if any(a > s for a, s in zip(alpha, sdeg)):
                    bad.append((sdeg, alpha, flat))
        return bad

    def max_abs(self):
        return max(
            (j.max_abs() for part in self.parts.values() for j in part.values()),
            default=0.0,
        )


class GaugeError(ValueError):
    pass


class GaugeParams:
    """Over-parametrization data: all jets share one base point and field.

    beta[i] is a 4-vector (components along D_0, D_1, D_2, D_3), gamma[i] a
    7-vector, mu[i] a jet, frame[i] a spatial 3-vector of jets (components of
    D_i along the coordinate derivations).  pair_exp can carry closed-form
    jets for exp(mu_j + mu_k), exp(2 mu_i) and exp(2 mu_i + mu_j + mu_k),
    keyed ("jk", i), ("ii", i), ("iijk", i); otherwise they are built with
    jet_exp (which needs a zero constant term in the rational field).
    """

    def __init__(self, beta, gamma, mu, frame, base, field, pair_exp=None):
        self.beta = beta
        self.gamma = gamma
        self.mu = mu
        self.frame = frame
        self.base = tuple(base)
        self.field = field
        self.pair_exp = pair_exp
        self.mu_spatialized = False

    def frame_derive(self, m, f: Jet) -> Jet:
        """D_m(f) for m = 0..3; D_0 is d/dt, spatial via frame components."""
        if m == 0:
            return f.derive(0)
        out = None
        for k in (1, 2, 3):
            c = self.frame[m][k]
            if c is None or c.is_zero(0.0):
                continue
            term = c * f.derive(k)
            out = term if out is None else out + term
        return out if out is not None else Jet.zero(self.base, self.field, _order_minus(f.order))

    def beta_derive(self, i, f: Jet) -> Jet:
        out = None
        for m in range(4):
            b = self.beta[i][m]
            if b is None or b.is_zero(0.0):
                continue
            term = b * self.frame_derive(m, f)
            out = term if out is None else out + term
        return out if out is not None else Jet.zero(self.base, self.field, _order_minus(f.order))

    def exp_pair(self, kind, i) -> Jet:
        if self.pair_exp is not None and (kind, i) in self.pair_exp:
            return self.pair_exp[(kind, i)]
        _, j, k = next(c for c in CYCLIC if c[0] == i)
        if kind == "jk":
            return jet_exp(self.mu[j] + self.mu[k])
        if kind == "ii":
            return jet_exp(self.mu[i] + self.mu[i])
        if kind == "iijk":
            return jet_exp(self.mu[i] + self.mu[i] + self.mu[j] + self.mu[k])
        raise GaugeError(f"unknown exponential kind {kind!r}")


def _order_minus(order):
    return None if order is None else order - 1


def _g000_flats(algebra):
    flats = algebra.flats_of_alpha[(0, 0, 0)]
    return flats  # table order: d0 d1 d2 d3 s0 (th0s0+th_i s_i)x3 E6, then th0-mults


def _family_flats(algebra, alpha):
    return algebra.flats_of_alpha[tuple(alpha)]


def assemble_gauge(p: GaugeParams, mode="free", algebra: FrameAlgebra = None) -> SElement:
    """The affine gauge element theta_0 D_0 + sum over cyclic (i,j,k) of the
    eight parameter groups, stored per s-multidegree.  The element itself is
    mode-independent; `mode` is kept for interface symmetry and validated."""
    if mode not in MODES:
        raise GaugeError(f"unknown mode {mode!r}")
    algebra = algebra or get_algebra()
    base, field = p.base, p.field
    one = Jet.constant(1, base, field)
    x = SElement.zero(algebra, base, field)

    g000 = _g000_flats(algebra)
    # theta_0 D_0: the theta_0-multiple of the d0 record
    th0_d0 = g000[9]  # records: 0..8 table order, 9..17 their theta_0 multiples
    x.add_term((0, 0, 0), th0_d0, one)

    for i, j, k in CYCLIC:
        a011 = _alpha_e(i)
        a2 = _alpha_e(i, two=True)
        a211 = tuple(2 if p_ == i else 1 for p_ in (1, 2, 3))
        f011 = _family_flats(algebra, a011)
        f2 = _family_flats(algebra, a2)
        f211 = _family_flats(algebra, a211)

        E_jk = p.exp_pair("jk", i)
        # gamma^0 group, s-degree 0: -gamma_i^0 (theta_i s_i + theta_0 s_0)
        x.add_term((0, 0, 0), g000[4 + i], -p.gamma[i][0])
        # gamma^1 group: + shat_i^2 gamma_i^1 * (200-type basis element)
        g1 = p.gamma[i][1]
        if not g1.is_zero(0.0):
            x.add_term(a2, f2[0], p.exp_pair("ii", i) * g1)
        # beta group: + shat_j shat_k theta_i beta_i
        for m in range(4):
            b = p.beta[i][m]
            if b is None or b.is_zero(0.0):
                continue
            if m == 0:
                x.add_term(a011, f011[2], E_jk * b)  # theta_i d0
            else:
                for kk in (1, 2, 3):
                    c = p.frame[m][kk]
                    if c is None or c.is_zero(0.0):
                        continue
                    x.add_term(a011, f011[2 + kk], E_jk * b * c)
        # gamma^2 group: -(gamma_i^2 + beta_i(mu1+mu2+mu3)) (th0 s_i + th_i s0)
        mus = p.mu[1] + p.mu[2] + p.mu[3]
        co = p.gamma[i][2] + p.beta_derive(i, mus)
        x.add_term(a011, f011[6], -(E_jk * co))
        # gamma^3 group: -(gamma_i^3 - beta_i(mu_k)) theta_k sigma_{ki}
        co = p.gamma[i][3] - p.beta_derive(i, p.mu[k])
        x.add_term(a011, f011[8], -(E_jk * co))
        # gamma^4 group: -(gamma_i^4 + beta_i(mu_j)) theta_j sigma_{ij}
        co = p.gamma[i][4] + p.beta_derive(i, p.mu[j])
        x.add_term(a011, f011[9], -(E_jk * co))
        # gamma^5 group: -gamma_i^5 (theta_k s_j + theta_j s_k)
        g5 = p.gamma[i][5]
        if not g5.is_zero(0.0):
            x.add_term(a011, f011[7], -(E_jk * g5))
        # gamma^6 group: + shat^2_i shat_j shat_k gamma_i^6 (th_j s_k - th_k s_j)
        g6 = p.gamma[i][6]
        if not g6.is_zero(0.0):
            x.add_term(a211, f211[0], p.exp_pair("iijk", i) * g6)
    return x


def mc_residual(x: SElement, mode="free", algebra: FrameAlgebra = None):
    """[x, x] with the mode's graded-bracket projection, per multidegree.

    Returns {multidegree: GradedElement}; multidegrees are triples for modes
    "E"/"free" and (p2, p3) pairs for "bounce".  All parts empty or zero
    means x is Maurer-Cartan for that mode.
    """
    if mode not in MODES:
        raise GaugeError(f"unknown mode {mode!r}")
    algebra = algebra or x.algebra
    degs = x.homological_degrees()
    if degs and degs != [1]:
        raise GaugeError(f"mc_residual needs a homogeneous degree-1 element, got degrees {degs}")
    keys = sorted(x.parts)
    elements = {s: x.element(s) for s in keys}
    accum = {}  # result s-degree -> ambient Element
    for a_i, s1 in enumerate(keys):
        for s2 in keys[a_i:]:
            br = l_bracket(elements[s1], elements[s2], algebra.conv)
            if s2 != s1:
                br = br.scale(2)
            if not br.terms:
                continue
            key = tuple(a + b for a, b in zip(s1, s2))
            accum[key] = br if key not in accum else accum[key] + br
    out = {}
    for key, el in accum.items():
        span, _ = algebra.decompose_jets(el)
        if mode == "E":
            kept = span
            okey = key
        elif mode == "free":
            kept = {f: j for f, j in span.items() if algebra.alpha_of[f] == key}
            okey = key
        else:
            okey = (key[1], key[2])
            kept = {
                f: j
                for f, j in span.items()
                if algebra.alpha_of[f][1:] == okey
            }
        if not kept:
            continue
        ge = GradedElement(kept, algebra, x.base, x.field)
        out[okey] = ge if okey not in out else out[okey] + ge
    return {k: v for k, v in out.items() if not v.is_zero(0.0)}


def residual_max_abs(res) -> float:
    return max((ge.max_abs() for ge in res.values()), default=0.0)


def residual_is_zero(res, tol=DEFAULT_TOL) -> bool:
    return all(ge.is_zero(tol) for ge in res.values())


# -- constraint data ---------------------------------------------------------


class ConstraintData:
    """Tuple (g_i^0, D_i, xi) with structure functions and derived data.

    frame: dict i -> {k: Jet} spatial components of D_i (i, k = 1..3).
    c: dict (j,k) -> [c^1, c^2, c^3] for the cyclic pairs (2,3), (3,1), (1,2).
    """

    def __init__(self, g0, frame, xi, base, field, c=None):
        self.g0 = g0
        self.frame = frame
        self.xi = xi
        self.base = tuple(base)
        self.field = field
        self.c = c if c is not None else self.structure_functions()

    def frame_derive(self, i, f: Jet) -> Jet:
        out = None
        for k in (1, 2, 3):
            coeff = self.frame[i][k]
            if coeff is None or coeff.is_zero(0.0):
                continue
            term = coeff * f.derive(k)
            out = term if out is None else out + term
        if out is None:
            return Jet.zero(self.base, self.field, _order_minus(f.order))
        return out

    def commutator_components(self, j, k):
        """Components of [D_j, D_k] along the coordinate derivations."""
        out = {}
        for m in (1, 2, 3):
            a = self.frame_derive(j, self.frame[k][m])
            b = self.frame_derive(k, self.frame[j][m])
            out[m] = a - b
        return out

    def frame_matrix(self):
        return [[self.frame[i][m] for i in (1, 2, 3)] for m in (1, 2, 3)]

    def structure_functions(self):
        """Solve [D_j, D_k] = sum_i c_{jk}^i D_i for the cyclic pairs."""
        c = {}
        M = self.frame_matrix()
        for j, k in CYCLIC_PAIRS:
            comm = self.commutator_components(j, k)
            rhs = [comm[m] for m in (1, 2, 3)]
            c[(j, k)] = solve3(M, rhs, self.base, self.field)
        return c

    def c_of(self, j, k, i) -> Jet:
        if j == k:
            return Jet.zero(self.base, self.field)
        if (j, k) in self.c:
            return self.c[(j, k)][i - 1]
        return -self.c[(k, j)][i - 1]

    def derived_g(self):
        """g^1..g^4 triples of the constraint dictionary."""
        g1, g2, g3, g4 = {}, {}, {}, {}
        for i, j, k in CYCLIC:
            g1[i] = self.c_of(j, k, i).scale(self._minus_half())
            g2[i] = self.frame_derive(i, self.xi)
            g3[i] = -self.c_of(k, i, k) - g2[i]
            g4[i] = -self.c_of(i, j, j) + g2[i]
        return g1, g2, g3, g4

    def _minus_half(self):
        from .scalars import coerce

        if self.field == RATIONAL:
            return coerce(-1, self.field) / coerce(2, self.field)
        return -0.5

    def validate_frame_invertible(self):
        d = det3(self.frame_matrix()).const_term()
        degenerate = (d == 0) if self.field == RATIONAL else abs(float(d)) < 1e-12
        if degenerate:
            raise GaugeError("frame is degenerate at the base point")


def solve3(M, rhs, base, field):
    """Exact 3x3 jet linear solve via the adjugate; needs det nonzero at base."""
    d = det3(M)
    dc = d.const_term()
    if (field == RATIONAL and dc == 0) or (field != RATIONAL and abs(float(dc)) < 1e-13):
        raise GaugeError("singular 3x3 jet system (frame degenerate at base point)")
    dinv = jet_inv(d)
    cof = lambda r, c: (  # noqa: E731
        M[(r + 1) % 3][(c + 1) % 3] * M[(r + 2) % 3][(c + 2) % 3]
        - M[(r + 1) % 3][(c + 2) % 3] * M[(r + 2) % 3][(c + 1) % 3]
    )
    out = []
    for i in range(3):
        acc = None
        for r in range(3):
            term = cof(r, i) * rhs[r]
            acc = term if acc is None else acc + term
        out.append(acc * dinv)
    return out


def det3(M):
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


def derived_gauge_data(c: ConstraintData):
    return c.derived_g()


def constraint_residuals(c: ConstraintData):
    """Residual jets of the three constraint-equation groups."""
    out = {}
    g = c.g0
    out["mce1"] = g[2] * g[3] + g[3] * g[1] + g[1] * g[2]
    for i, j, k in CYCLIC:
        r = c.frame_derive(i, g[j] + g[k])
        r = r + c.c_of(i, j, j) * (g[i] - g[j])
        r = r + c.c_of(i, k, k) * (g[i] - g[k])
        r = r - (c.frame_derive(i, c.xi) * g[i]).scale(2)
        out[f"mce2_{i}"] = r
    for j, k in CYCLIC_PAIRS:
        comm = c.commutator_components(j, k)
        for m in (1, 2, 3):
            r = comm[m]
            for i in (1, 2, 3):
                r = r - c.c_of(j, k, i) * c.frame[i][m]
            out[f"mce3_{j}{k}_{m}"] = r
    return out


def residuals_all_zero(res, tol=DEFAULT_TOL):
    return all(j.is_zero(tol) for j in res.values())


def params_from_constraint_data(c: ConstraintData, order=None) -> GaugeParams:
    """Sufficiency-lemma parameters: mu_i = t g_i^0, beta_i = D_i, gamma^{5,6}=0."""
    base, field = c.base, c.field
    g1, g2, g3, g4 = c.derived_g()
    t = Jet.variable("t", base, field, order)
    zero = Jet.zero(base, field, order)
    one = Jet.constant(1, base, field, order)
    beta = {i: [zero, zero, zero, zero] for i in (1, 2, 3)}
    for i in (1, 2, 3):
        beta[i][i] = one
    gamma = {
        i: [c.g0[i], g1[i], g2[i], g3[i], g4[i], zero, zero] for i in (1, 2, 3)
    }
    mu = {i: t * c.g0[i] for i in (1, 2, 3)}
    frame = {i: {k: c.frame[i][k] for k in (1, 2, 3)} for i in (1, 2, 3)}
    return GaugeParams(beta, gamma, mu, frame, base, field)


def check_necessary_conditions(p: GaugeParams, tol=DEFAULT_TOL):
    """Time-derivative report for the quantities the free MC condition freezes."""
    for i in (1, 2, 3):
        hyp = p.mu[i].derive(0) - p.gamma[i][0]
        if not hyp.is_zero(tol):
            raise GaugeError(f"hypothesis D0(mu_{i}) = gamma_{i}^0 violated")
    if getattr(p, "mu_spatialized", False):
        raise GaugeError(
            "params carry spatialized mu data; rebuild with full mu jets "
            "(float field) to check the D0 conditions"
        )
    report = []
    for i, j, k in CYCLIC:
        for m in range(4):
            d = p.beta[i][m].derive(0)
            if not d.is_zero(tol):
                report.append((f"beta_{i}^{m}", d))
        for a in (0, 1, 2, 3, 4, 6):
            d = p.gamma[i][a].derive(0)
            if not d.is_zero(tol):
                report.append((f"gamma_{i}^{a}", d))
        q = p.exp_pair("jk", i) * p.gamma[i][5]
        d = q.derive(0)
        if not d.is_zero(tol):
            report.append((f"exp(mu_{j}+mu_{k}) gamma_{i}^5", d))
    return report
