from fractions import Fraction

import pytest

from bklbounce import linalg as la
from bklbounce.algebra import (
    DecompositionError,
    decompose_graded,
    filtration_degree,
    get_algebra,
)
from bklbounce.elements import Element, anchor_is_zero, const_element
from bklbounce.exterior import slot_parities
from bklbounce.jets import Jet
from bklbounce.scalars import RATIONAL
from bklbounce.table import ALPHAS, TABLE_RANKS, full_basis, slot_vector, table_basis_slots

BASE = (0, 0, 0, 0)


def test_ranks_match_table():
    for alpha in ALPHAS:
        assert len(table_basis_slots(alpha)) == TABLE_RANKS[alpha]
    assert sum(TABLE_RANKS.values()) == 72
    assert table_basis_slots((1, 0, 0)) == ()


def test_144_linearly_independent():
    rows = [slot_vector(r.slots) for r in full_basis()]
    assert la.rank(rows, la.QQ) == 144


def test_decompose_examples(algebra):
    # theta_1 s23 splits evenly between the 020 and 002 pieces
    ge = decompose_graded(const_element(1, (1,), "s23"), algebra, strict=True)
    comps = {algebra.alpha_of[f]: j.const_term() for f, j in ge.coeffs.items()}
    assert comps == {(0, 2, 0): Fraction(1, 2), (0, 0, 2): Fraction(1, 2)}

    aplus = const_element(1, (2,), "s3") + const_element(1, (3,), "s2")
    assert decompose_graded(aplus, algebra, strict=True).support() == [(0, 1, 1)]
    aminus = const_element(1, (2,), "s3") - const_element(1, (3,), "s2")
    assert decompose_graded(aminus, algebra, strict=True).support() == [(2, 1, 1)]


def test_filtration_degrees(algebra):
    aplus = decompose_graded(const_element(1, (2,), "s3") + const_element(1, (3,), "s2"), algebra)
    aminus = decompose_graded(const_element(1, (2,), "s3") - const_element(1, (3,), "s2"), algebra)
    assert filtration_degree(aplus, "1-index") == 0
    assert filtration_degree(aminus, "1-index") == 2
    for idx in algebra.flats_of_alpha[(0, 1, 1)]:
        ge = decompose_graded(algebra.basis_element(idx), algebra)
        assert filtration_degree(ge, "3-index") == (0, 1, 1)
        assert filtration_degree(ge, "2-index") == (1, 1)


def test_reassembly_is_identity(algebra):
    import random

    random.seed(3)
    el = Element.zero(BASE, RATIONAL)
    for _ in range(6):
        f = random.randrange(144)
        c = Jet.from_coeffs({(0, 0, 0, 0): random.randint(-5, 5)}, BASE, RATIONAL, 2)
        el = el + algebra.basis_element(f, BASE, RATIONAL).mul_jet(c)
    ge = decompose_graded(el, algebra, strict=True)
    assert (ge.reassemble() - el).is_zero_in_L(0.0)


def test_strict_decompose_rejects_ideal_directions(algebra):
    # an own-plane rotation monomial is not in the basis span
    e = const_element(1, (2, 3), "s23")
    with pytest.raises(DecompositionError):
        decompose_graded(e, algebra, strict=True)
    ge = decompose_graded(e, algebra, strict=False)
    assert ge.ideal_part


def test_representation_nonfaithful_records(algebra):
    """The anchor pair kills a known set of table records; equality in the
    algebra is therefore coefficient equality, not image equality (the open
    contradiction is flagged here, not silently absorbed)."""
    zero_image = sorted(
        repr(r) for r in algebra.records if anchor_is_zero(algebra.basis_element(r.flat))
    )
    assert "<G000[8]>" in zero_image  # the six-term G_000 generator
    assert "<th0*G011[7]>" in zero_image
    assert len(zero_image) == 14


def test_rep_filtration_cross_check(algebra):
    """1-index degrees via the Z2-graded representation definition agree with
    the table multidegrees on every basis element, decomposition by
    decomposition."""
    from bklbounce.elements import anchor_rep
    from bklbounce.exterior import mask_parity, slot_parity

    def w1(mask, d):
        return sum(1 for i in {0: (2, 3), 1: (3, 1), 2: (1, 2)}[d] if mask & (1 << i))

    for rec in algebra.records:
        el = algebra.basis_element(rec.flat)
        rep = anchor_rep(el, algebra.conv)
        for d in range(3):
            pars = {slot_parity(mask, gen, d) for (mask, gen) in rec.slots}
            assert len(pars) == 1, f"{rec!r} mixes parities"
            parity = pars.pop()
            shift = 0
            entries = list(rep.mult[0]) + list(rep.mult[1]) + [
                (tm, sm) for (tm, sm, _) in rep.der
            ]
            for tm, sm in entries:
                shift = max(shift, w1(tm, d) - w1(sm, d))
            p_min = shift if (shift % 2) == parity else shift + 1
            if all(
                jet.is_zero(0.0)
                for half in rep.mult
                for jet in half.values()
            ) and not rep.der:
                p_min = parity
            assert p_min <= rec.alpha[d], f"{rec!r} dec {d}"
            assert (rec.alpha[d] - p_min) % 2 == 0
            assert p_min == rec.alpha[d] or (
                # zero-image elements sit at their parity level
                p_min == parity
            )
