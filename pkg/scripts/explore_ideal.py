"""Exploration: kernel of the pair rep, span/kernel interaction, ideal construction."""

import sys
import time
from collections import defaultdict

from bklbounce import linalg as la
from bklbounce.exterior import DEFAULT_CONVENTION, GENS, SIGMAS, slot_parities, mask_degree
from bklbounce.table import (
    ALPHAS,
    NSLOTS,
    SLOT_POS,
    SLOTS,
    full_basis,
    slot_rep_entries,
    slot_vector,
    slotdict_bracket,
    slotdict_rep_vector,
    table_basis_slots,
)

conv = DEFAULT_CONVENTION
F = la.QQ

t0 = time.time()
basis = full_basis()
print(f"total basis records: {len(basis)}")

B_cols = [slot_vector(r.slots) for r in basis]  # 144 x 176 rows-as-vectors
print("rank of the 144 in L:", la.rank(B_cols, F))

# kernel of rho per theta-degree, sigma+der slots
slots_by_deg = defaultdict(list)
for s in SLOTS:
    slots_by_deg[mask_degree(s[0])].append(s)

ker_by_deg = {}
for d in range(5):
    slots = slots_by_deg[d]
    rows = []
    cols_used = sorted({p for s in slots for p, _ in slot_rep_entries(s, conv)})
    colpos = {c: i for i, c in enumerate(cols_used)}
    # matrix: rep-coord x slot
    M = [[F.zero()] * len(slots) for _ in cols_used]
    for j, s in enumerate(slots):
        for p, v in slot_rep_entries(s, conv):
            M[colpos[p]][j] = F.of(v)
    ker = la.nullspace(M, F)
    ker_by_deg[d] = (slots, ker)
    print(f"deg {d}: slots={len(slots)}, ker dim={len(ker)}")

# span cap kernel per degree
for d in range(5):
    slots, ker = ker_by_deg[d]
    span_d = []
    names = []
    for r in basis:
        if r.slots and all(mask_degree(k[0]) == d for k in r.slots):
            span_d.append([F.of(r.slots.get(s, 0)) for s in slots])
            names.append(repr(r))
    if not span_d or not ker:
        print(f"deg {d}: span_d={len(span_d)}, no intersection possible")
        continue
    inter = la.intersect_rowspaces(span_d, ker, F)
    print(f"deg {d}: span dim={len(span_d)}, span∩ker dim={len(inter)}")

# which basis records individually have zero rep image
zero_img = [repr(r) for r in basis if not slotdict_rep_vector(r.slots, conv)]
print("basis records with zero rep image:", len(zero_img))
for n in zero_img:
    print("   ", n)

print("elapsed", time.time() - t0)
