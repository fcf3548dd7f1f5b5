"""Construct the canonical ideal complement and test the ideal property."""

import time
from collections import defaultdict

from bklbounce import linalg as la
from bklbounce.exterior import DEFAULT_CONVENTION, mask_degree
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
B_rows = [slot_vector(r.slots) for r in basis]  # rows = basis vectors (144 x 176)
B_cols = la.transpose(B_rows)  # 176 x 144

# pivot slots P of the span (deterministic), complement slots C
R, piv = la.rref(B_rows, F)  # row space pivots = slot positions
P = piv
C = [i for i in range(NSLOTS) if i not in set(P)]
print("complement slots C (32):")
for c in C:
    mask, gen = SLOTS[c]
    print(f"   mask={mask:04b} gen={gen} deg={mask_degree(mask)}")

# B[P] inverse for the canonical span projection
BP = [[B_cols[p][j] for j in range(144)] for p in P]  # 144 x 144
BPinv = la.inverse(la.mat(BP, F), F)


def pi_span_coords(v):
    vP = [F.of(v[p]) for p in P]
    return la.matvec(BPinv, vP, F)  # 144 coords


def pi_C(v):
    c = pi_span_coords(v)
    Bc = [F.zero()] * NSLOTS
    for j, cj in enumerate(c):
        if not F.is_zero(cj):
            for i, bij in enumerate(B_rows[j]):
                if bij:
                    Bc[i] = F.add(Bc[i], F.mul(cj, F.of(bij)))
    return [F.sub(F.of(v[i]), Bc[i]) for i in range(NSLOTS)]


# kernel of rho per degree, as slot vectors
slots_by_deg = defaultdict(list)
for s in SLOTS:
    slots_by_deg[mask_degree(s[0])].append(s)

kernel_vectors = []  # full 176-dim
for d in (2, 3, 4):
    slots = slots_by_deg[d]
    cols_used = sorted({p for s in slots for p, _ in slot_rep_entries(s, conv)})
    colpos = {cc: i for i, cc in enumerate(cols_used)}
    M = [[F.zero()] * len(slots) for _ in cols_used]
    for j, s in enumerate(slots):
        for p, v in slot_rep_entries(s, conv):
            M[colpos[p]][j] = F.of(v)
    for kv in la.nullspace(M, F):
        full = [F.zero()] * NSLOTS
        for j, s in enumerate(slots):
            full[SLOT_POS[s]] = kv[j]
        kernel_vectors.append(full)
print("total kernel dim:", len(kernel_vectors))

# solve for N: for each C slot q pick kernel vector with pi_C = e_q
# phi matrix: rows = C-coords of each kernel vector
phi = [pi_C(kv) for kv in kernel_vectors]
phi_C = [[row[c] for c in C] for row in phi]  # 46 x 32
# solve x^T phi_C = e_q  =>  phi_C^T x = e_q
phiT = la.transpose(phi_C)
N = []
for qi, q in enumerate(C):
    e = [F.one() if j == qi else F.zero() for j in range(32)]
    x = la.solve(phiT, e, F)
    assert x is not None, f"C slot {SLOTS[q]} not reachable in kernel"
    nv = [F.zero()] * NSLOTS
    for t, kv in zip(x, kernel_vectors):
        if not F.is_zero(t):
            for i in range(NSLOTS):
                nv[i] = F.add(nv[i], F.mul(t, kv[i]))
    N.append(nv)
print("constructed N columns:", len(N))

M_full = la.transpose(B_rows + N)  # 176 x 176
Minv = la.inverse(M_full, F)
print("[B|N] invertible: True")


def decompose(v):
    coords = la.matvec(Minv, [F.of(x) for x in v], F)
    return coords[:144], coords[144:]


def sd_to_vec(sd):
    v = [0] * NSLOTS
    for key, c in sd.items():
        v[SLOT_POS[key]] = c
    return v


# ideal test: [slot, n_q] must have zero span part
fails = 0
checked = 0
bad_examples = []
for slot in SLOTS:
    gsd = {slot: 1}
    for qi, nv in enumerate(N):
        nsd = {SLOTS[i]: nv[i] for i in range(NSLOTS) if not F.is_zero(nv[i])}
        br = slotdict_bracket(gsd, nsd, conv)
        if not br:
            checked += 1
            continue
        span_part, ideal_part = decompose(sd_to_vec(br))
        if any(not F.is_zero(x) for x in span_part):
            fails += 1
            if len(bad_examples) < 5:
                nz = [(i, str(x)) for i, x in enumerate(span_part) if not F.is_zero(x)]
                bad_examples.append((slot, SLOTS[C[qi]], nz[:6]))
        checked += 1
print(f"ideal test: {checked} brackets, {fails} with nonzero span part")
for ex in bad_examples:
    print("   bad:", ex)

print("elapsed", time.time() - t0)
