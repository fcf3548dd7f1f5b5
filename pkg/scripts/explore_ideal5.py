"""Full ideal construction from the Casimir-12 eigenspace + closure test."""

import time
from collections import defaultdict

from bklbounce import linalg as la
from bklbounce.exterior import DEFAULT_CONVENTION, mask_degree, wedge
from bklbounce.table import (
    ALPHAS,
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


def vec_of_sd(sd):
    v = [F.zero()] * NSLOTS
    for key, c in sd.items():
        v[SLOT_POS[key]] = F.of(c)
    return v


def sd_of_vec(v):
    return {SLOTS[i]: v[i] for i in range(NSLOTS) if not F.is_zero(v[i])}


def kernel_of_degree(d):
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


K2 = kernel_of_degree(2)
nk = len(K2)
K2_mat = [kv[:] for kv in K2]

GENS6 = ["s1", "s2", "s3", "s23", "s31", "s12"]
ad = {}
for g in GENS6:
    cols = []
    for kv in K2:
        br = slotdict_bracket({(0, g): 1}, sd_of_vec(kv), conv)
        x = la.solve(la.transpose(K2_mat), vec_of_sd(br), F)
        cols.append(x)
    ad[g] = la.transpose(cols)

C1 = la.zeros(nk, nk, F)
rot_of = {"s1": "s23", "s2": "s31", "s3": "s12"}
for bg in ("s1", "s2", "s3"):
    KK = la.matmul(ad[bg], ad[bg], F)
    JJ = la.matmul(ad[rot_of[bg]], ad[rot_of[bg]], F)
    for r in range(nk):
        for c in range(nk):
            C1[r][c] = F.add(C1[r][c], F.sub(KK[r][c], JJ[r][c]))

M12 = [[F.sub(C1[r][c], F.of(12) if r == c else F.zero()) for c in range(nk)] for r in range(nk)]
I2_coords = la.nullspace(M12, F)
I2 = []
for coefs in I2_coords:
    v = [F.zero()] * NSLOTS
    for t, kv in zip(coefs, K2):
        if not F.is_zero(t):
            for i in range(NSLOTS):
                v[i] = F.add(v[i], F.mul(t, kv[i]))
    I2.append(v)
print("dim I2:", len(I2))

# wedge to degrees 3 and 4
def theta_wedge_vec(a, v):
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


I3_raw = [theta_wedge_vec(a, v) for a in range(4) for v in I2]
R3, piv3 = la.rref(I3_raw, F)
I3 = [R3[i] for i in range(len(piv3))]
print("dim I3 = dim(W ^ I2):", len(I3))

I4_raw = [theta_wedge_vec(a, v) for a in range(4) for v in I3]
R4, piv4 = la.rref(I4_raw, F)
I4 = [R4[i] for i in range(len(piv4))]
print("dim I4:", len(I4))

K4 = kernel_of_degree(4)
# I4 should equal ker4
both = la.rref(I4 + K4, F)
print("dim(I4 + ker4):", len(both[1]), "(expect 6)")

N = I2 + I3 + I4
M_full = la.transpose(B_rows + N)
try:
    Minv = la.inverse(M_full, F)
    print("[B|N] invertible: True")
except ZeroDivisionError:
    print("[B|N] SINGULAR")
    raise SystemExit(1)


def decompose(v):
    coords = la.matvec(Minv, [F.of(x) for x in v], F)
    return coords[:144], coords[144:]


# full ideal property
fails = 0
for slot in SLOTS:
    gsd = {slot: 1}
    for nv in N:
        br = slotdict_bracket(gsd, sd_of_vec(nv), conv)
        if not br:
            continue
        span_part, _ = decompose(vec_of_sd(br))
        if any(not F.is_zero(x) for x in span_part):
            fails += 1
print("ideal-property failures over all 176 x 32 brackets:", fails)
print("elapsed so far", time.time() - t0)

# closure: all 144 x 144 basis brackets supported at beta <= alpha_a + alpha_b
def leq(b, a):
    return all(x <= y for x, y in zip(b, a))


viol = 0
pairs = 0
for ra in basis:
    for rb in basis:
        pairs += 1
        br = slotdict_bracket(ra.slots, rb.slots, conv)
        if not br:
            continue
        span_part, _ = decompose(vec_of_sd(br))
        target = tuple(x + y for x, y in zip(ra.alpha, rb.alpha))
        for j, c in enumerate(span_part):
            if F.is_zero(c):
                continue
            if not leq(basis[j].alpha, target):
                viol += 1
                if viol < 8:
                    print("closure violation:", ra, rb, "->", basis[j], c)
print(f"closure: {pairs} pairs, {viol} violations")
print("elapsed", time.time() - t0)
