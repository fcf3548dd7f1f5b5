"""The eleven graded pieces G_alpha and their explicit spanning elements.

Basis elements are stored as integer slot dictionaries {(mask, gen): int};
the 144-element basis of the algebra is the 72 tabulated elements together
with their theta_0-multiples.  This module also provides the
constant-coefficient structural bracket and the slot vectors of the pair
representation, both used by the calibration machinery.
"""

from __future__ import annotations

from functools import lru_cache

from .exterior import (
    DER_AXIS,
    DERS,
    GENS,
    SIGMAS,
    canon_sign,
    generator_commutator,
    mask_degree,
    mask_of,
    omega_weight,
    sigma_on_monomial,
    slot_parities,
    wedge,
)

CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))

ALPHAS = (
    (0, 0, 0),
    (2, 0, 0),
    (0, 2, 0),
    (0, 0, 2),
    (0, 1, 1),
    (1, 0, 1),
    (1, 1, 0),
    (2, 1, 1),
    (1, 2, 1),
    (1, 1, 2),
    (2, 2, 2),
)

TABLE_RANKS = {
    (0, 0, 0): 9,
    (2, 0, 0): 1,
    (0, 2, 0): 1,
    (0, 0, 2): 1,
    (0, 1, 1): 11,
    (1, 0, 1): 11,
    (1, 1, 0): 11,
    (2, 1, 1): 7,
    (1, 2, 1): 7,
    (1, 1, 2): 7,
    (2, 2, 2): 6,
}

SLOTS = tuple((mask, gen) for mask in range(16) for gen in GENS)
SLOT_POS = {s: i for i, s in enumerate(SLOTS)}
NSLOTS = len(SLOTS)  # 176


def _rot(i: int) -> str:
    return {1: "s23", 2: "s31", 3: "s12"}[i]


def _boost(i: int) -> str:
    return f"s{i}"


def slotdict(terms) -> dict:
    """terms: iterable of (coef, theta-index-seq, gen); canonicalizes order."""
    out = {}
    for coef, idxs, gen in terms:
        s, srt = canon_sign(tuple(idxs))
        if s == 0:
            continue
        key = (mask_of(srt), gen)
        out[key] = out.get(key, 0) + coef * s
    return {k: v for k, v in out.items() if v != 0}


def theta0_slotdict(sd: dict) -> dict:
    out = {}
    for (mask, gen), c in sd.items():
        s, m = wedge(0b0001, mask)
        if s == 0:
            continue
        key = (m, gen)
        out[key] = out.get(key, 0) + c * s
    return {k: v for k, v in out.items() if v != 0}


@lru_cache(maxsize=None)
def table_basis_slots(alpha):
    """Spanning elements of G_alpha E_G, in table order, as slot dicts."""
    a = tuple(alpha)
    if a == (0, 0, 0):
        els = [slotdict([(1, (), d)]) for d in DERS]
        els.append(slotdict([(1, (), "s0")]))
        for i in (1, 2, 3):
            els.append(slotdict([(1, (0,), "s0"), (1, (i,), _boost(i))]))
        els.append(
            slotdict(
                [
                    (1, (2, 3), "s23"),
                    (1, (3, 1), "s31"),
                    (1, (1, 2), "s12"),
                    (2, (0, 1), "s1"),
                    (2, (0, 2), "s2"),
                    (2, (0, 3), "s3"),
                ]
            )
        )
        return tuple(els)
    for i, j, k in CYCLIC:
        if a == tuple(2 if p == i else 0 for p in (1, 2, 3)):
            return (
                slotdict(
                    [(-1, (i,), _rot(i)), (1, (j,), _rot(j)), (1, (k,), _rot(k))]
                ),
            )
        if a == tuple(0 if p == i else 1 for p in (1, 2, 3)):
            els = [
                slotdict([(1, (), _boost(i))]),
                slotdict([(1, (), _rot(i))]),
            ]
            els += [slotdict([(1, (i,), d)]) for d in DERS]
            els += [
                slotdict([(1, (0,), _boost(i)), (1, (i,), "s0")]),
                slotdict([(1, (j,), _boost(k)), (1, (k,), _boost(j))]),
                slotdict([(1, (k,), _rot(j))]),  # theta_k sigma_{ki}
                slotdict([(1, (j,), _rot(k))]),  # theta_j sigma_{ij}
                slotdict([(1, (0, j), _rot(k)), (1, (i, j), _boost(j))]),
            ]
            return tuple(els)
        if a == tuple(2 if p == i else 1 for p in (1, 2, 3)):
            els = [
                slotdict([(1, (j,), _boost(k)), (-1, (k,), _boost(j))]),
            ]
            els += [slotdict([(1, (j, k), d)]) for d in DERS]
            els += [
                slotdict(
                    [
                        (1, (0, j), _boost(k)),
                        (-1, (0, k), _boost(j)),
                        (-2, (j, k), "s0"),
                    ]
                ),
                slotdict(
                    [
                        (1, (0, j), _boost(k)),
                        (1, (0, k), _boost(j)),
                        (-2, (i, j), _rot(j)),
                    ]
                ),
            ]
            return tuple(els)
    if a == (2, 2, 2):
        els = [
            slotdict(
                [
                    (1, (0, 1), "s23"),
                    (1, (0, 2), "s31"),
                    (1, (0, 3), "s12"),
                    (-2, (2, 3), "s1"),
                    (-2, (3, 1), "s2"),
                    (-2, (1, 2), "s3"),
                ]
            )
        ]
        els += [slotdict([(1, (1, 2, 3), d)]) for d in DERS]
        els.append(
            slotdict(
                [
                    (1, (0, 2, 3), "s1"),
                    (1, (0, 3, 1), "s2"),
                    (1, (0, 1, 2), "s3"),
                    (3, (1, 2, 3), "s0"),
                ]
            )
        )
        return tuple(els)
    return ()


class BasisRecord:
    __slots__ = ("alpha", "index", "theta0", "slots", "flat")

    def __init__(self, alpha, index, theta0, slots, flat):
        self.alpha = alpha
        self.index = index
        self.theta0 = theta0
        self.slots = slots
        self.flat = flat

    def __repr__(self):
        pre = "th0*" if self.theta0 else ""
        return f"<{pre}G{''.join(map(str, self.alpha))}[{self.index}]>"


@lru_cache(maxsize=None)
def full_basis():
    """All 144 records: per alpha the table elements, then their theta_0 multiples."""
    records = []
    flat = 0
    for alpha in ALPHAS:
        els = table_basis_slots(alpha)
        for idx, sd in enumerate(els):
            records.append(BasisRecord(alpha, idx, False, sd, flat))
            flat += 1
        for idx, sd in enumerate(els):
            records.append(BasisRecord(alpha, idx, True, theta0_slotdict(sd), flat))
            flat += 1
    return tuple(records)


def slot_vector(sd: dict):
    v = [0] * NSLOTS
    for key, c in sd.items():
        v[SLOT_POS[key]] = c
    return v


def slots_degree(key) -> int:
    return mask_degree(key[0])


def slotdict_parities(sd: dict):
    """Common (F,F',F'') parity triple; None when mixed."""
    pars = {slot_parities(mask, gen) for (mask, gen) in sd}
    return pars.pop() if len(pars) == 1 else None


# -- constant-coefficient structural bracket --------------------------------


@lru_cache(maxsize=None)
def slot_bracket(t1, t2, conv):
    """[slot1, slot2] for unit constant coefficients; jet-derivative terms drop."""
    (ma, ga), (mb, gb) = t1, t2
    pa, pb = mask_degree(ma), mask_degree(mb)
    sgn = -1 if (pa * pb) % 2 else 1
    out = {}

    def add(mask, gen, c):
        if c:
            key = (mask, gen)
            out[key] = out.get(key, 0) + c

    if ga in SIGMAS:
        for c, m2 in sigma_on_monomial(conv, ga, mb):
            s, m = wedge(ma, m2)
            if s:
                add(m, gb, c * s)
    if gb in SIGMAS:
        for c, m2 in sigma_on_monomial(conv, gb, ma):
            s, m = wedge(mb, m2)
            if s:
                add(m, ga, -sgn * c * s)
    comm = generator_commutator(conv, ga, gb)
    if comm:
        s, m = wedge(ma, mb)
        if s:
            for coef, g in comm:
                add(m, g, coef * s)
    return tuple((k, v) for k, v in out.items() if v != 0)


def slotdict_bracket(sd1: dict, sd2: dict, conv) -> dict:
    out = {}
    for k1, c1 in sd1.items():
        for k2, c2 in sd2.items():
            for key, c in slot_bracket(k1, k2, conv):
                out[key] = out.get(key, 0) + c1 * c2 * c
    return {k: v for k, v in out.items() if v != 0}


# -- pair-representation vectors at constant coefficients --------------------

# coordinate layout: ("m0"|"m1", tm, sm) multipliers, ("d", tm, sm, axis)
REP_KEYS = tuple(
    [("m0", tm, sm) for tm in range(16) for sm in range(16)]
    + [("m1", tm, sm) for tm in range(16) for sm in range(16)]
    + [("d", tm, sm, ax) for tm in range(16) for sm in range(16) for ax in range(4)]
)
REP_POS = {k: i for i, k in enumerate(REP_KEYS)}


@lru_cache(maxsize=None)
def slot_rep_entries(slot, conv):
    """Sparse pair-representation image of a unit-coefficient slot."""
    mask, gen = slot
    ent = {}

    def add(key, c):
        if c:
            ent[key] = ent.get(key, 0) + c

    if gen in SIGMAS:
        w = omega_weight(gen)
        for sm in range(16):
            for c, m2 in sigma_on_monomial(conv, gen, sm):
                s, tm = wedge(mask, m2)
                if s:
                    add(("m0", tm, sm), c * s)
                    add(("m1", tm, sm), c * s)
            if w:
                s, tm = wedge(mask, sm)
                if s:
                    add(("m1", tm, sm), w * s)
    else:
        ax = DER_AXIS[gen]
        for sm in range(16):
            s, tm = wedge(mask, sm)
            if s:
                add(("d", tm, sm, ax), s)
    return tuple(sorted((REP_POS[k], v) for k, v in ent.items() if v))


def slotdict_rep_vector(sd: dict, conv) -> dict:
    out = {}
    for slot, c in sd.items():
        for pos, v in slot_rep_entries(slot, conv):
            out[pos] = out.get(pos, 0) + c * v
    return {p: v for p, v in out.items() if v != 0}
