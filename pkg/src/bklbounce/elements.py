"""Elements of the frame graded Lie algebra, presented inside
L = (wedge W) tensor CDerEnd(W): finite sums of jet * theta-monomial * generator.

The structural bracket is
    [w d, w' d'] = w ^ d(w') d'  -  (-1)^{pp'} w' ^ d'(w) d  +  (w ^ w') [d, d']
where a sigma acts on theta monomials as a derivation of wedge W, a coordinate
derivation acts on jet coefficients, and [d, d'] is the generator commutator.
Homological degree of a term is the length of its theta monomial.
"""

from __future__ import annotations

from .exterior import (
    DER_AXIS,
    DERS,
    GENS,
    SIGMAS,
    DEFAULT_CONVENTION,
    generator_commutator,
    mask_degree,
    mask_indices,
    mask_of,
    omega_weight,
    sigma_on_monomial,
    wedge,
)
from .jets import Jet
from .scalars import DEFAULT_TOL, RATIONAL


class ElementError(ValueError):
    pass


class Element:
    __slots__ = ("terms", "base", "field")

    def __init__(self, terms, base, field):
        self.terms = terms
        self.base = tuple(base)
        self.field = field

    @classmethod
    def zero(cls, base, field):
        return cls({}, base, field)

    @classmethod
    def single(cls, coeff: Jet, thetas, gen: str) -> "Element":
        if gen not in GENS:
            raise ElementError(f"unknown generator {gen!r}")
        mask = thetas if isinstance(thetas, int) else mask_of(thetas)
        return cls({(mask, gen): coeff}, coeff.base, coeff.field)

    @classmethod
    def from_terms(cls, items, base, field):
        el = cls.zero(base, field)
        for coeff, thetas, gen in items:
            el = el + cls.single(coeff, thetas, gen)
        return el

    def _add_term(self, terms, mask, gen, jet):
        key = (mask, gen)
        cur = terms.get(key)
        terms[key] = jet if cur is None else cur + jet

    def __add__(self, other):
        if other == 0:
            return self
        terms = dict(self.terms)
        for (mask, gen), jet in other.terms.items():
            self._add_term(terms, mask, gen, jet)
        return Element(terms, self.base, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Element({k: -v for k, v in self.terms.items()}, self.base, self.field)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return Element({k: v.scale(s) for k, v in self.terms.items()}, self.base, self.field)

    def mul_jet(self, f: Jet):
        return Element({k: v * f for k, v in self.terms.items()}, self.base, self.field)

    def compress(self, tol=0.0):
        terms = {k: v for k, v in self.terms.items() if not v.is_zero(tol)}
        return Element(terms, self.base, self.field)

    def is_zero_in_L(self, tol=DEFAULT_TOL):
        """Zero as an element of the free module L (slotwise coefficients)."""
        return all(v.is_zero(tol) for v in self.terms.values())

    def max_abs(self):
        return max((v.max_abs() for v in self.terms.values()), default=0.0)

    def degrees(self):
        return sorted({mask_degree(m) for (m, _), v in self.terms.items() if not v.is_zero(0.0)})

    def homological_components(self):
        out = {}
        for (mask, gen), jet in self.terms.items():
            d = mask_degree(mask)
            out.setdefault(d, {})[(mask, gen)] = jet
        return {d: Element(t, self.base, self.field) for d, t in sorted(out.items())}

    def theta0_multiply(self):
        terms = {}
        for (mask, gen), jet in self.terms.items():
            s, m = wedge(0b0001, mask)
            if s == 0:
                continue
            self._add_term(terms, m, gen, jet.scale(s))
        return Element(terms, self.base, self.field)

    def derive_coeffs(self, axis):
        return Element({k: v.derive(axis) for k, v in self.terms.items()}, self.base, self.field)

    def truncate(self, order):
        return Element({k: v.truncate(order) for k, v in self.terms.items()}, self.base, self.field)

    def to_float(self):
        base = tuple(float(b) for b in self.base)
        return Element({k: v.to_float() for k, v in self.terms.items()}, base, "float")

    def to_json(self):
        return [
            {"coeff": jet.to_json(), "theta": list(mask_indices(mask)), "gen": gen}
            for (mask, gen), jet in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, obj, field):
        items = []
        for entry in obj:
            jet = Jet.from_json(entry["coeff"], field)
            items.append((jet, tuple(entry["theta"]), entry["gen"]))
        if not items:
            raise ElementError("empty element JSON needs an explicit base")
        return cls.from_terms(items, items[0][0].base, field)

    def __repr__(self):
        bits = []
        for (mask, gen), jet in sorted(self.terms.items()):
            th = "".join(f"th{i}" for i in mask_indices(mask)) or "1"
            bits.append(f"({jet!r})*{th}*{gen}")
        return "Element[" + " + ".join(bits[:8]) + ("..." if len(bits) > 8 else "") + "]"


def bracket(a: Element, b: Element, conv=DEFAULT_CONVENTION) -> Element:
    """Structural bracket in L; graded antisymmetric, degree additive."""
    terms = {}
    base, field = a.base, a.field
    out = Element(terms, base, field)
    for (ma, ga), ca in a.terms.items():
        pa = mask_degree(ma)
        for (mb, gb), cb in b.terms.items():
            pb = mask_degree(mb)
            sgn = -1 if (pa * pb) % 2 else 1
            prod = None  # ca*cb, computed at most once per pair

            # term 1:  w ^ ga(w') gb
            if ga in SIGMAS:
                for c, m2 in sigma_on_monomial(conv, ga, mb):
                    s, m = wedge(ma, m2)
                    if s == 0:
                        continue
                    if prod is None:
                        prod = ca * cb
                    out._add_term(terms, m, gb, prod.scale(c * s))
            else:
                s, m = wedge(ma, mb)
                if s != 0:
                    dcb = cb.derive(DER_AXIS[ga])
                    if not dcb.is_zero(0.0):
                        out._add_term(terms, m, gb, (ca * dcb).scale(s))

            # term 2:  -(-1)^{pp'} w' ^ gb(w) ga
            if gb in SIGMAS:
                for c, m2 in sigma_on_monomial(conv, gb, ma):
                    s, m = wedge(mb, m2)
                    if s == 0:
                        continue
                    if prod is None:
                        prod = ca * cb
                    out._add_term(terms, m, ga, prod.scale(-sgn * c * s))
            else:
                s, m = wedge(mb, ma)
                if s != 0:
                    dca = ca.derive(DER_AXIS[gb])
                    if not dca.is_zero(0.0):
                        out._add_term(terms, m, ga, (cb * dca).scale(-sgn * s))

            # term 3:  (w ^ w') [ga, gb]
            comm = generator_commutator(conv, ga, gb)
            if comm:
                s, m = wedge(ma, mb)
                if s != 0:
                    if prod is None:
                        prod = ca * cb
                    for coef, g in comm:
                        out._add_term(terms, m, g, prod.scale(coef * s))
    return out.compress()


# -- the anchor representation ----------------------------------------------


class OperatorRep:
    """Image of an element under the pair representation on
    wedge W and (wedge W) tensor Omega.

    mult[h][(tm, sm)] is a jet multiplier sending f*theta_sm to
    (jet*f)*theta_tm on half h (0 = wedge W, 1 = Omega-weighted half);
    der[(tm, sm, axis)] sends f*theta_sm to jet*(d_axis f)*theta_tm, the same
    on both halves.
    """

    __slots__ = ("mult", "der", "base", "field")

    def __init__(self, mult, der, base, field):
        self.mult = mult
        self.der = der
        self.base = base
        self.field = field

    def is_zero(self, tol=DEFAULT_TOL):
        return all(
            v.is_zero(tol) for half in self.mult for v in half.values()
        ) and all(v.is_zero(tol) for v in self.der.values())

    def apply(self, half: int, vec, with_coeff_derivatives=True):
        """Apply to a vector dict mask -> Jet; returns the same shape."""
        out = {}
        for (tm, sm), jet in self.mult[half].items():
            f = vec.get(sm)
            if f is None:
                continue
            cur = out.get(tm)
            add = jet * f
            out[tm] = add if cur is None else cur + add
        if with_coeff_derivatives:
            for (tm, sm, axis), jet in self.der.items():
                f = vec.get(sm)
                if f is None:
                    continue
                add = jet * f.derive(axis)
                cur = out.get(tm)
                out[tm] = add if cur is None else cur + add
        return {m: v for m, v in out.items() if not v.is_zero(0.0)}


def anchor_rep(e: Element, conv=DEFAULT_CONVENTION) -> OperatorRep:
    mult = ({}, {})
    der = {}

    def addm(half, tm, sm, jet):
        key = (tm, sm)
        cur = mult[half].get(key)
        mult[half][key] = jet if cur is None else cur + jet

    for (mask, gen), coeff in e.terms.items():
        if gen in SIGMAS:
            w = omega_weight(gen)
            for sm in range(16):
                for c, m2 in sigma_on_monomial(conv, gen, sm):
                    s, tm = wedge(mask, m2)
                    if s == 0:
                        continue
                    addm(0, tm, sm, coeff.scale(c * s))
                    addm(1, tm, sm, coeff.scale(c * s))
                if w:
                    s, tm = wedge(mask, sm)
                    if s != 0:
                        addm(1, tm, sm, coeff.scale(w * s))
        else:
            axis = DER_AXIS[gen]
            for sm in range(16):
                s, tm = wedge(mask, sm)
                if s == 0:
                    continue
                key = (tm, sm, axis)
                cur = der.get(key)
                add = coeff.scale(s)
                der[key] = add if cur is None else cur + add
    return OperatorRep(
        tuple({k: v for k, v in half.items() if not v.is_zero(0.0)} for half in mult),
        {k: v for k, v in der.items() if not v.is_zero(0.0)},
        e.base,
        e.field,
    )


def anchor_is_zero(e: Element, conv=DEFAULT_CONVENTION, tol=DEFAULT_TOL) -> bool:
    """Whether the pair-representation image is the zero operator pair."""
    return anchor_rep(e, conv).is_zero(tol)


def const_element(value, thetas, gen, base=(0, 0, 0, 0), field=RATIONAL) -> Element:
    return Element.single(Jet.constant(value, base, field), thetas, gen)
