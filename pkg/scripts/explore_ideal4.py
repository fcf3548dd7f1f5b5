"""Isotypic analysis of the degree-2 kernel under ad(so(1,3))."""

import time
from collections import defaultdict
from fractions import Fraction

import numpy as np

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
B_rows = [slot_vector(r.slots) for r in basis]
R, piv = la.rref(B_rows, F)
P, Pset = piv, set(piv)
C = [i for i in range(NSLOTS) if i not in Pset]
B_cols = la.transpose(B_rows)
BPinv = la.inverse(la.mat([[B_cols[p][j] for j in range(144)] for p in P], F), F)


def pi_C_coords(v):
    c = la.matvec(BPinv, [F.of(v[p]) for p in P], F)
    out = []
    for q in C:
        acc = F.of(v[q])
        for j, cj in enumerate(c):
            b = B_rows[j][q]
            if b and not F.is_zero(cj):
                acc = F.sub(acc, F.mul(cj, F.of(b)))
        out.append(acc)
    return out


def kernel_of_degree(d):
    slots = [s for s in SLOTS if mask_degree(s[0]) == d]
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
    return kvs


K2 = kernel_of_degree(2)
nk = len(K2)
print("dim K2:", nk)

# coordinates: express ad_g K2 back in the K2 basis
K2_mat = [kv[:] for kv in K2]  # rows


def to_K2_coords(v):
    x = la.solve(la.transpose(K2_mat), v, F)
    assert x is not None, "vector not in K2"
    return x


def vec_of_sd(sd):
    v = [F.zero()] * NSLOTS
    for key, c in sd.items():
        v[SLOT_POS[key]] = F.of(c)
    return v


def sd_of_vec(v):
    return {SLOTS[i]: v[i] for i in range(NSLOTS) if not F.is_zero(v[i])}


GENS6 = ["s1", "s2", "s3", "s23", "s31", "s12"]
ad = {}
for g in GENS6:
    cols = []
    for kv in K2:
        br = slotdict_bracket({(0, g): 1}, sd_of_vec(kv), conv)
        cols.append(to_K2_coords(vec_of_sd(br)))
    ad[g] = la.transpose(cols)  # matrix acting on K2 coords

# Casimirs
def mm(A, B):
    return la.matmul(A, B, F)

C1 = la.zeros(nk, nk, F)
C2 = la.zeros(nk, nk, F)
rot_of = {"s1": "s23", "s2": "s31", "s3": "s12"}
for i, bg in enumerate(("s1", "s2", "s3")):
    rg = rot_of[bg]
    KK = mm(ad[bg], ad[bg])
    JJ = mm(ad[rg], ad[rg])
    KJ = la.matmul(ad[bg], ad[rg], F)
    JK = la.matmul(ad[rg], ad[bg], F)
    for r in range(nk):
        for c in range(nk):
            C1[r][c] = F.add(C1[r][c], F.sub(KK[r][c], JJ[r][c]))
            C2[r][c] = F.add(C2[r][c], F.add(KJ[r][c], JK[r][c]))

A1 = np.array([[float(x) for x in row] for row in C1])
A2 = np.array([[float(x) for x in row] for row in C2])
print("C1 eigvals:", sorted(set(np.round(np.linalg.eigvals(A1).real, 6))))
print("C2 eigvals:", sorted(set(np.round(np.linalg.eigvals(A2).real, 6))))

# span∩ker in K2 coordinates
U = []
phiC = [pi_C_coords(kv) for kv in K2]
for coefs in la.nullspace(la.transpose(la.mat(phiC, F)), F):
    U.append(coefs)  # in K2 coords
print("dim U (span∩ker2):", len(U))

# exact eigenspaces of C1 for the candidate rational eigenvalues
eigvals = sorted(set(Fraction(round(v * 2), 2) for v in np.linalg.eigvals(A1).real for v in [round(v, 6)]))
print("candidate rational eigenvalues:", eigvals)
tot = 0
for lam in eigvals:
    M = [[F.sub(C1[r][c], F.of(lam) if r == c else F.zero()) for c in range(nk)] for r in range(nk)]
    es = la.nullspace(M, F)
    if not es:
        continue
    tot += len(es)
    # dim of intersection with U
    inter = la.intersect_rowspaces(es, U, F) if U else []
    # C2 action on this eigenspace
    print(f"lambda={lam}: eigenspace dim {len(es)}, dim(E ∩ U) = {len(inter)}")
print("sum of eigenspace dims:", tot)
print("elapsed", time.time() - t0)
