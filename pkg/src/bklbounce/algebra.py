"""The 144-dimensional frame graded Lie algebra over jets.

Elements of the algebra are identified with coefficient vectors over the
144-element basis (Table pieces plus their theta_0 multiples).  The bracket
is computed structurally in the ambient free module L and then projected to
basis coordinates along an ideal complement I with L = span(basis) (+) I.

I is canonical: its degree-2 part is the Casimir-eigenvalue-12 isotypic
component of the degree-2 kernel of the pair representation (a 10-dim
ad(so(1,3))-stable complement of the span/kernel overlap), and the rest is
its wedge closure.  Construction and all stated properties (bracket
stability, complementarity) are verified at calibration time; failures raise
CalibrationError with a structured report.
"""

from __future__ import annotations

from functools import lru_cache

from . import linalg as la
from .elements import Element, bracket as l_bracket
from .exterior import DEFAULT_CONVENTION, SignConvention, mask_degree, wedge
from .jets import Jet
from .scalars import DEFAULT_TOL, RATIONAL
from .table import (
    ALPHAS,
    NSLOTS,
    SLOT_POS,
    SLOTS,
    full_basis,
    slot_rep_entries,
    slot_vector,
    slotdict_bracket,
)

F = la.QQ


class CalibrationError(RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


def _kernel_of_degree(conv, d):
    slots = [s for s in SLOTS if mask_degree(s[0]) == d]
    cols_used = sorted({p for s in slots for p, _ in slot_rep_entries(s, conv)})
    colpos = {cc: i for i, cc in enumerate(cols_used)}
    M = [[F.zero()] * len(slots) for _ in cols_used]
    for j, s in enumerate(slots):
        for p, v in slot_rep_entries(s, conv):
            M[colpos[p]][j] = F.of(v)
    out = []
    for kv in la.nullspace(M, F):
        full = [F.zero()] * NSLOTS
        for j, s in enumerate(slots):
            full[SLOT_POS[s]] = kv[j]
        out.append(full)
    return out


def _theta_wedge_vec(a, v):
    out = [F.zero()] * NSLOTS
    for i in range(NSLOTS):
        if F.is_zero(v[i]):
            continue
        mask, gen = SLOTS[i]
        s, m = wedge(1 << a, mask)
        if s:
            j = SLOT_POS[(m, gen)]
            out[j] = F.add(out[j], F.mul(F.of(s), v[i]))
    return out


def _ideal_basis(conv):
    """Degree-graded basis of the ideal complement I (10 + 16 + 6 vectors)."""
    K2 = _kernel_of_degree(conv, 2)
    nk = len(K2)
    if nk != 20:
        raise CalibrationError(
            f"degree-2 kernel has dim {nk}, expected 20", {"kernel_dim_2": nk}
        )
    K2T = la.transpose(K2)

    def sd_of_vec(v):
        return {SLOTS[i]: v[i] for i in range(NSLOTS) if not F.is_zero(v[i])}

    ad = {}
    for g in ("s1", "s2", "s3", "s23", "s31", "s12"):
        cols = []
        for kv in K2:
            br = slotdict_bracket({(0, g): 1}, sd_of_vec(kv), conv)
            v = [F.zero()] * NSLOTS
            for key, c in br.items():
                v[SLOT_POS[key]] = F.of(c)
            x = la.solve(K2T, v, F)
            if x is None:
                raise CalibrationError(f"ad_{g} does not preserve the degree-2 kernel")
            cols.append(x)
        ad[g] = la.transpose(cols)

    cas = la.zeros(nk, nk, F)
    for bg, rg in (("s1", "s23"), ("s2", "s31"), ("s3", "s12")):
        KK = la.matmul(ad[bg], ad[bg], F)
        JJ = la.matmul(ad[rg], ad[rg], F)
        for r in range(nk):
            for c in range(nk):
                cas[r][c] = F.add(cas[r][c], F.sub(KK[r][c], JJ[r][c]))
    twelve = F.of(12)
    M12 = [
        [F.sub(cas[r][c], twelve if r == c else F.zero()) for c in range(nk)]
        for r in range(nk)
    ]
    I2 = []
    for coefs in la.nullspace(M12, F):
        v = [F.zero()] * NSLOTS
        for t, kv in zip(coefs, K2):
            if not F.is_zero(t):
                for i in range(NSLOTS):
                    v[i] = F.add(v[i], F.mul(t, kv[i]))
        I2.append(v)
    if len(I2) != 10:
        raise CalibrationError(
            f"Casimir-12 eigenspace has dim {len(I2)}, expected 10",
            {"casimir12_dim": len(I2)},
        )
    I3_raw = [_theta_wedge_vec(a, v) for a in range(4) for v in I2]
    R3, piv3 = la.rref(I3_raw, F)
    I3 = [R3[i] for i in range(len(piv3))]
    I4_raw = [_theta_wedge_vec(a, v) for a in range(4) for v in I3]
    R4, piv4 = la.rref(I4_raw, F)
    I4 = [R4[i] for i in range(len(piv4))]
    if len(I3) != 16 or len(I4) != 6:
        raise CalibrationError(
            f"wedge closure dims ({len(I3)}, {len(I4)}) != (16, 6)",
            {"ideal_dims": (10, len(I3), len(I4))},
        )
    return I2 + I3 + I4


class FrameAlgebra:
    """Calibrated algebra: basis data, ideal complement, block decompositions."""

    def __init__(self, conv: SignConvention = DEFAULT_CONVENTION):
        self.conv = conv
        self.records = full_basis()
        self.nbasis = len(self.records)
        self.alpha_of = [r.alpha for r in self.records]
        self.flats_of_alpha = {}
        for i, r in enumerate(self.records):
            self.flats_of_alpha.setdefault(r.alpha, []).append(i)
        if la.rank([slot_vector(r.slots) for r in self.records], F) != self.nbasis:
            raise CalibrationError("table basis is linearly dependent in L")
        self.ideal = _ideal_basis(conv)
        self._build_blocks()

    def _build_blocks(self):
        """Per-theta-degree change-of-basis: slots -> (basis coords | ideal coords)."""
        self.deg_slots = {d: [] for d in range(5)}
        for i, (mask, gen) in enumerate(SLOTS):
            self.deg_slots[mask_degree(mask)].append(i)
        self.slot_local = {}
        for d, idxs in self.deg_slots.items():
            for loc, i in enumerate(idxs):
                self.slot_local[i] = (d, loc)

        self.block_basis = {d: [] for d in range(5)}  # flat basis indices per degree
        cols = {d: [] for d in range(5)}
        for fi, r in enumerate(self.records):
            v = slot_vector(r.slots)
            d = mask_degree(next(iter(r.slots))[0])
            self.block_basis[d].append(fi)
            cols[d].append([F.of(v[i]) for i in self.deg_slots[d]])
        self.block_ideal_count = {d: 0 for d in range(5)}
        for nv in self.ideal:
            nz = [i for i in range(NSLOTS) if not F.is_zero(nv[i])]
            d = mask_degree(SLOTS[nz[0]][0])
            cols[d].append([nv[i] for i in self.deg_slots[d]])
            self.block_ideal_count[d] += 1
        self.block_inv = {}
        for d in range(5):
            n = len(self.deg_slots[d])
            if len(cols[d]) != n:
                raise CalibrationError(
                    f"degree {d}: {len(cols[d])} columns vs {n} slots; span+ideal does not fill L"
                )
            M = la.transpose(cols[d])
            try:
                Minv = la.inverse(M, F)
            except ZeroDivisionError:
                raise CalibrationError(f"degree {d}: basis+ideal columns are dependent")
            # sparse rows
            self.block_inv[d] = [
                [(j, x) for j, x in enumerate(row) if not F.is_zero(x)] for row in Minv
            ]

    # -- decomposition -----------------------------------------------------

    def decompose_ints(self, sd):
        """Slot dict with scalar coefficients -> (basis coords, ideal coords) dicts."""
        by_deg = {}
        for key, c in sd.items():
            d, loc = self.slot_local[SLOT_POS[key]]
            by_deg.setdefault(d, {})[loc] = F.of(c)
        span, ideal = {}, {}
        for d, locs in by_deg.items():
            nb = len(self.block_basis[d])
            for out_i, row in enumerate(self.block_inv[d]):
                acc = F.zero()
                for j, x in row:
                    v = locs.get(j)
                    if v is not None:
                        acc = F.add(acc, F.mul(x, v))
                if F.is_zero(acc):
                    continue
                if out_i < nb:
                    span[self.block_basis[d][out_i]] = acc
                else:
                    ideal[(d, out_i - nb)] = acc
        return span, ideal

    def decompose_jets(self, el: Element):
        """Element with jet coefficients -> (basis coords, ideal coords) jet dicts."""
        by_deg = {}
        for (mask, gen), jet in el.terms.items():
            d, loc = self.slot_local[SLOT_POS[(mask, gen)]]
            by_deg.setdefault(d, {})[loc] = jet
        span, ideal = {}, {}
        for d, locs in by_deg.items():
            nb = len(self.block_basis[d])
            for out_i, row in enumerate(self.block_inv[d]):
                acc = None
                for j, x in row:
                    jet = locs.get(j)
                    if jet is None:
                        continue
                    term = jet.scale(x if el.field == RATIONAL else float(x))
                    acc = term if acc is None else acc + term
                if acc is None or acc.is_zero(0.0):
                    continue
                if out_i < nb:
                    span[self.block_basis[d][out_i]] = acc
                else:
                    ideal[(d, out_i - nb)] = acc
        return span, ideal

    # -- reconstruction ------------------------------------------------------

    def basis_element(self, flat: int, base=(0, 0, 0, 0), field=RATIONAL) -> Element:
        r = self.records[flat]
        terms = {}
        for (mask, gen), c in r.slots.items():
            terms[(mask, gen)] = Jet.constant(c, base, field)
        return Element(terms, base, field)

    def reconstruct(self, coeffs, base, field) -> Element:
        el = Element.zero(base, field)
        for flat, jet in coeffs.items():
            r = self.records[flat]
            terms = {}
            for (mask, gen), c in r.slots.items():
                terms[(mask, gen)] = jet.scale(c if field == RATIONAL else float(c))
            el = el + Element(terms, base, field)
        return el

    # -- cached constant structure -----------------------------------------

    @lru_cache(maxsize=None)
    def structure_pair(self, i: int, j: int):
        """Basis coords of [e_i, e_j] (constant coefficients); cached."""
        br = slotdict_bracket(self.records[i].slots, self.records[j].slots, self.conv)
        span, _ = self.decompose_ints(br)
        return tuple(sorted(span.items()))

    def verify_ideal_property(self, sample=None):
        """[slot, n] has zero basis part for every slot and ideal generator."""
        bad = []
        slots = SLOTS if sample is None else sample
        for slot in slots:
            gsd = {slot: 1}
            for qi, nv in enumerate(self.ideal):
                nsd = {SLOTS[i]: nv[i] for i in range(NSLOTS) if not F.is_zero(nv[i])}
                br = slotdict_bracket(gsd, nsd, self.conv)
                if not br:
                    continue
                span, _ = self.decompose_ints(br)
                if span:
                    bad.append((slot, qi))
        return bad


@lru_cache(maxsize=8)
def get_algebra(conv: SignConvention = DEFAULT_CONVENTION) -> FrameAlgebra:
    return FrameAlgebra(conv)


# -- graded elements ---------------------------------------------------------


class GradedElement:
    """Coefficients over the 144 basis, grouped by multidegree on demand."""

    __slots__ = ("coeffs", "algebra", "base", "field", "ideal_part")

    def __init__(self, coeffs, algebra, base, field, ideal_part=None):
        self.coeffs = coeffs
        self.algebra = algebra
        self.base = tuple(base)
        self.field = field
        self.ideal_part = ideal_part or {}

    def support(self, tol=DEFAULT_TOL):
        alphas = set()
        for flat, jet in self.coeffs.items():
            if not jet.is_zero(tol):
                alphas.add(self.algebra.alpha_of[flat])
        return sorted(alphas)

    def by_alpha(self, tol=0.0):
        out = {}
        for flat, jet in self.coeffs.items():
            if jet.is_zero(tol):
                continue
            out.setdefault(self.algebra.alpha_of[flat], {})[flat] = jet
        return out

    def component(self, alpha) -> Element:
        sub = {f: j for f, j in self.coeffs.items() if self.algebra.alpha_of[f] == tuple(alpha)}
        return self.algebra.reconstruct(sub, self.base, self.field)

    def reassemble(self) -> Element:
        return self.algebra.reconstruct(self.coeffs, self.base, self.field)

    def is_zero(self, tol=DEFAULT_TOL):
        return all(j.is_zero(tol) for j in self.coeffs.values())

    def max_abs(self):
        return max((j.max_abs() for j in self.coeffs.values()), default=0.0)

    def __add__(self, other):
        coeffs = dict(self.coeffs)
        for f, j in other.coeffs.items():
            coeffs[f] = j if f not in coeffs else coeffs[f] + j
        return GradedElement(coeffs, self.algebra, self.base, self.field)

    def scale(self, s):
        return GradedElement(
            {f: j.scale(s) for f, j in self.coeffs.items()},
            self.algebra, self.base, self.field,
        )


class DecompositionError(ValueError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


def decompose_graded(el: Element, algebra: FrameAlgebra = None, strict=False,
                     tol=DEFAULT_TOL) -> GradedElement:
    """Express an ambient element in the 144 basis; the ideal part is the
    representative's slack and vanishes exactly for elements of the algebra."""
    algebra = algebra or get_algebra()
    span, ideal = algebra.decompose_jets(el)
    if strict:
        bad = {k: j for k, j in ideal.items() if not j.is_zero(tol)}
        if bad:
            residual = max(j.max_abs() for j in bad.values())
            raise DecompositionError(
                f"element lies outside the basis span (ideal residual {residual:.3e})",
                bad,
            )
    return GradedElement(span, algebra, el.base, el.field, ideal)


def is_zero_in_E(el: Element, algebra: FrameAlgebra = None, tol=DEFAULT_TOL) -> bool:
    """Zero as an element of the algebra: all 144 basis coordinates vanish."""
    return decompose_graded(el, algebra).is_zero(tol)


def bracket_graded(a: Element, b: Element, algebra: FrameAlgebra = None) -> GradedElement:
    algebra = algebra or get_algebra()
    return decompose_graded(l_bracket(a, b, algebra.conv), algebra)


# -- filtration degrees ------------------------------------------------------


def filtration_degree(ge: GradedElement, variant: str, tol=DEFAULT_TOL):
    """Minimal filtration index containing the element, from graded support."""
    sup = ge.support(tol)
    if not sup:
        return None
    if variant == "1-index":
        return max(a[0] for a in sup)
    if variant == "2-index":
        return (max(a[1] for a in sup), max(a[2] for a in sup))
    if variant == "3-index":
        return tuple(max(a[i] for a in sup) for i in range(3))
    raise ValueError(f"unknown variant {variant!r}")
