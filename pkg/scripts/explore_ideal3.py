"""Repair the ideal complement: solve for span-kernel shifts making it bracket-stable."""

import time
from collections import defaultdict

from bklbounce import linalg as la
from bklbounce.exterior import DEFAULT_CONVENTION, mask_degree, slot_parities
from bklbounce.table import (
    NSLOTS,
    SLOT_POS,
    SLOTS,
    full_basis,
    slot_rep_entries,
    slot_vector,
    slotdict_bracket,
)

conv = DEFAULT_CONVENTION
F = la.QQ
t0 = time.time()

basis = full_basis()
B_rows = [slot_vector(r.slots) for r in basis]

R, piv = la.rref(B_rows, F)
P = piv
C = [i for i in range(NSLOTS) if i not in set(P)]
B_cols = la.transpose(B_rows)
BP = la.mat([[B_cols[p][j] for j in range(144)] for p in P], F)
BPinv = la.inverse(BP, F)


def span_coords_canonical(v):
    """Coords c with v - B c supported on C (the canonical projection)."""
    vP = [F.of(v[p]) for p in P]
    return la.matvec(BPinv, vP, F)


def pi_C_coords(v):
    c = span_coords_canonical(v)
    out = []
    for q in C:
        acc = F.of(v[q])
        for j, cj in enumerate(c):
            b = B_rows[j][q]
            if b and not F.is_zero(cj):
                acc = F.sub(acc, F.mul(cj, F.of(b)))
        out.append(acc)
    return out


# kernel vectors per degree
slots_by_deg = defaultdict(list)
for s in SLOTS:
    slots_by_deg[mask_degree(s[0])].append(s)

kernel_by_deg = {}
for d in (2, 3, 4):
    slots = slots_by_deg[d]
    cols_used = sorted({p for s in slots for p, _ in slot_rep_entries(s, conv)})
    colpos = {cc: i for i, cc in enumerate(cols_used)}
    M = [[F.zero()] * len(slots) for _ in cols_used]
    for j, s in enumerate(slots):
        for p, v in slot_rep_entries(s, conv):
            M[colpos[p]][j] = F.of(v)
    kvs = []
    for kv in la.nullspace(M, F):
        full = [F.zero()] * NSLOTS
        for j, s in enumerate(slots):
            full[SLOT_POS[s]] = kv[j]
        kvs.append(full)
    kernel_by_deg[d] = kvs

# split kernel into span-kernel part and N part (canonical)
span_ker = []  # list of (degree, vector, span_coords)
N_raw = {}  # C-slot position -> vector
for d, kvs in kernel_by_deg.items():
    if not kvs:
        continue
    phiC = [pi_C_coords(kv) for kv in kvs]
    # rows of phiC that are zero -> in span
    # build N: solve for each C-slot of this degree
    for qi, q in enumerate(C):
        if mask_degree(SLOTS[q][0]) != d:
            continue
        e = [F.one() if j == qi else F.zero() for j in range(len(C))]
        x = la.solve(la.transpose(phiC), e, F)
        assert x is not None
        nv = [F.zero()] * NSLOTS
        for tcoef, kv in zip(x, kvs):
            if not F.is_zero(tcoef):
                for i in range(NSLOTS):
                    nv[i] = F.add(nv[i], F.mul(tcoef, kv[i]))
        N_raw[q] = nv
    # span∩ker basis of this degree: kernel of phiC^T... vectors k with pi_C(k)=0
    M2 = phiC
    for coefs in la.nullspace(la.transpose(la.mat(M2, F)), F):
        kv_comb = [F.zero()] * NSLOTS
        for tcoef, kv in zip(coefs, kvs):
            if not F.is_zero(tcoef):
                for i in range(NSLOTS):
                    kv_comb[i] = F.add(kv_comb[i], F.mul(tcoef, kv[i]))
        if any(not F.is_zero(x) for x in kv_comb):
            span_ker.append((d, kv_comb))
print("span∩ker vectors:", [(d, 1) for d, _ in span_ker].count((2, 1)), "deg2,",
      [(d, 1) for d, _ in span_ker].count((3, 1)), "deg3")

# precondition: [g, k] in span for all slots g, span-kernel k?
prec_fail = 0
for gi, g in enumerate(SLOTS):
    gsd = {g: 1}
    for d, kv in span_ker:
        ksd = {SLOTS[i]: kv[i] for i in range(NSLOTS) if not F.is_zero(kv[i])}
        br = slotdict_bracket(gsd, ksd, conv)
        if not br:
            continue
        v = [0] * NSLOTS
        for key, c in br.items():
            v[SLOT_POS[key]] = c
        if any(not F.is_zero(x) for x in pi_C_coords(v)):
            prec_fail += 1
print("brackets [slot, span∩ker] leaving span:", prec_fail)
print("elapsed", time.time() - t0)
