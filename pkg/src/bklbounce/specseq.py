"""Spectral sequence of a filtered complex over an exact field.

A FilteredComplex is a graded vector space V_0 (+) ... (+) V_P with a block
lower triangular differential d (blocks d_ij: V_j -> V_i for i >= j) and
d^2 = 0.  Pages are honest subquotients Z_ip / B_ip of the V_i with the
induced differentials along the p-th subdiagonal; the homology at page p
equals page p+1, and the last page is the associated graded of H(d).
Everything is exact (rationals or a prime field) with deterministic pivoting.
"""

from __future__ import annotations

import random as _random

from . import linalg as la
from .linalg import GF, QQ


class ComplexError(ValueError):
    pass


class FilteredComplex:
    def __init__(self, dims, blocks, field=QQ, hdeg=None):
        self.dims = list(dims)
        self.P = len(dims) - 1
        self.F = field
        self.offsets = [0]
        for n in dims:
            self.offsets.append(self.offsets[-1] + n)
        self.N = self.offsets[-1]
        self.blocks = {}
        for (i, j), M in blocks.items():
            if not (0 <= j <= i <= self.P):
                raise ComplexError(f"block ({i},{j}) is not lower triangular")
            if len(M) != dims[i] or any(len(r) != dims[j] for r in M):
                raise ComplexError(f"block ({i},{j}) has the wrong shape")
            self.blocks[(i, j)] = la.mat(M, field)
        self.hdeg = list(hdeg) if hdeg is not None else None
        if self.hdeg is not None and len(self.hdeg) != self.N:
            raise ComplexError("hdeg needs one label per total basis vector")
        self._validate_d2()
        if self.hdeg is not None:
            self._validate_hdeg()

    def block(self, i, j):
        M = self.blocks.get((i, j))
        if M is None:
            return la.zeros(self.dims[i], self.dims[j], self.F)
        return M

    def full_matrix(self):
        F = self.F
        D = la.zeros(self.N, self.N, F)
        for (i, j), M in self.blocks.items():
            oi, oj = self.offsets[i], self.offsets[j]
            for r in range(self.dims[i]):
                for c in range(self.dims[j]):
                    D[oi + r][oj + c] = M[r][c]
        return D

    def _validate_d2(self):
        F = self.F
        for i in range(self.P + 1):
            for j in range(i + 1):
                acc = la.zeros(self.dims[i], self.dims[j], F)
                for k in range(j, i + 1):
                    A, B = self.blocks.get((i, k)), self.blocks.get((k, j))
                    if A is None or B is None:
                        continue
                    AB = la.matmul(A, B, F)
                    for r in range(self.dims[i]):
                        for c in range(self.dims[j]):
                            acc[r][c] = F.add(acc[r][c], AB[r][c])
                if any(not F.is_zero(x) for row in acc for x in row):
                    raise ComplexError(f"d^2 != 0: nonzero block at ({i},{j})")

    def _validate_hdeg(self):
        F = self.F
        for (i, j), M in self.blocks.items():
            oi, oj = self.offsets[i], self.offsets[j]
            for r in range(self.dims[i]):
                for c in range(self.dims[j]):
                    if not F.is_zero(M[r][c]) and self.hdeg[oi + r] != self.hdeg[oj + c] + 1:
                        raise ComplexError(
                            "differential is not homogeneous of hdeg +1"
                        )

    def to_json(self):
        return {
            "dims": self.dims,
            "blocks": {
                f"({i},{j})": [[str(x) for x in row] for row in M]
                for (i, j), M in sorted(self.blocks.items())
            },
            "hdeg": self.hdeg,
        }

    @classmethod
    def from_json(cls, obj, field=QQ):
        from fractions import Fraction

        blocks = {}
        for key, M in obj.get("blocks", {}).items():
            i, j = (int(p) for p in key.strip("()").split(","))
            blocks[(i, j)] = [[Fraction(str(x)) for x in row] for row in M]
        return cls(obj["dims"], blocks, field=field, hdeg=obj.get("hdeg"))


class Page:
    """Data of one page: per filtration level the cycle/boundary bases inside
    V_i, quotient representatives, dims, and the subdiagonal differential."""

    def __init__(self, p):
        self.p = p
        self.Z = {}       # i -> list of vectors in V_i coords
        self.fillers = {} # i -> list of stacked filler vectors matching Z
        self.B = {}       # i -> list of vectors
        self.reps = {}    # i -> quotient representatives (subset span of Z)
        self.dims = {}    # i -> dim of the subquotient
        self.D = {}       # i -> matrix of D_{i+p,i} in quotient coordinates


def _sub_rows(fc, rows, cols, vecs_cols):
    """Rows of d for block-rows `rows` applied to stacked block-cols `cols`."""
    F = fc.F
    nr = sum(fc.dims[r] for r in rows)
    out = []
    for r in rows:
        for rr in range(fc.dims[r]):
            line = []
            for c in cols:
                blk = fc.block(r, c) if r >= c else None
                if blk is None:
                    line.extend([F.zero()] * fc.dims[c])
                else:
                    line.extend(blk[rr])
            out.append(line)
    return out


def _rref_span(vectors, F):
    if not vectors:
        return []
    R, piv = la.rref(vectors, F)
    return [R[i] for i in range(len(piv))]


class _IncSpan:
    """Incremental row span with online reduction (deterministic pivots)."""

    def __init__(self, F, seed=()):
        self.F = F
        self.rows = []
        self.pivots = []
        for v in seed:
            self.try_add(v)

    def reduce(self, v):
        F = self.F
        v = list(v)
        for row, pc in zip(self.rows, self.pivots):
            c = v[pc]
            if not F.is_zero(c):
                v = [F.sub(a, F.mul(c, b)) for a, b in zip(v, row)]
        return v

    def try_add(self, v):
        F = self.F
        r = self.reduce(v)
        pc = next((c for c, x in enumerate(r) if not F.is_zero(x)), None)
        if pc is None:
            return False
        inv = F.div(F.one(), r[pc])
        self.rows.append([F.mul(inv, x) for x in r])
        self.pivots.append(pc)
        return True


def _col_slices(fc, blocks_list):
    """Column index selections per hdeg value (or one full slice)."""
    if fc.hdeg is None:
        return {None: {i: list(range(fc.dims[i])) for i in blocks_list}}
    out = {}
    for i in blocks_list:
        off = fc.offsets[i]
        for c in range(fc.dims[i]):
            h = fc.hdeg[off + c]
            out.setdefault(h, {}).setdefault(i, []).append(c)
    for h in out:
        for i in blocks_list:
            out[h].setdefault(i, [])
    return out


def _zb_for(fc, i, p):
    """Cycle vectors (with fillers) and boundary vectors at (i, p), sliced by
    the homological grading when present (the conditions are hdeg-graded)."""
    F = fc.F
    ni = fc.dims[i]
    mids = [m for m in range(i + 1, min(i + p, fc.P + 1))]
    cols = [i] + mids
    rows = [r for r in range(i, min(i + p, fc.P + 1))]
    M = _sub_rows(fc, rows, cols, None)
    ncols_full = sum(fc.dims[c] for c in cols)
    col_offsets = {}
    acc = 0
    for c in cols:
        col_offsets[c] = acc
        acc += fc.dims[c]
    Z, fillers = [], []
    seen_span = _IncSpan(F)
    for h, sel in sorted(_col_slices(fc, cols).items(), key=lambda kv: str(kv[0])):
        subcols = [col_offsets[c] + cc for c in cols for cc in sel[c]]
        if not subcols:
            continue
        if M and M[0]:
            Msub = [[row[c] for c in subcols] for row in M if any(
                not F.is_zero(row[c]) for c in subcols)]
            ker = la.nullspace(Msub, F) if Msub else [
                [F.one() if a == b else F.zero() for b in range(len(subcols))]
                for a in range(len(subcols))
            ]
        else:
            ker = [[F.one() if a == b else F.zero() for b in range(len(subcols))]
                   for a in range(len(subcols))]
        ker = _rref_span(ker, F)
        for v in ker:
            full = [F.zero()] * ncols_full
            for c, val in zip(subcols, v):
                full[c] = val
            x = full[:ni]
            if all(F.is_zero(c) for c in x):
                continue
            if seen_span.try_add(x):
                Z.append(x)
                fillers.append(full[ni:])
    # boundaries
    rows_b = [r for r in range(max(i - p + 1, 0), i + 1)]
    Mb = _sub_rows(fc, rows_b, rows_b, None)
    nprefix = sum(fc.dims[r] for r in rows_b[:-1])
    B = []
    if Mb and Mb[0]:
        col_offsets_b = {}
        acc = 0
        for c in rows_b:
            col_offsets_b[c] = acc
            acc += fc.dims[c]
        for h, sel in sorted(_col_slices(fc, rows_b).items(), key=lambda kv: str(kv[0])):
            subcols = [col_offsets_b[c] + cc for c in rows_b for cc in sel[c]]
            if not subcols:
                continue
            cs_cols = [[row[c] for row in Mb] for c in subcols]
            img = _rref_span(cs_cols, F)
            if not img:
                continue
            prefix_mat = [v[:nprefix] for v in img]
            if nprefix:
                combos = la.nullspace(la.transpose(prefix_mat), F)
            else:
                combos = [
                    [F.one() if a == b else F.zero() for b in range(len(img))]
                    for a in range(len(img))
                ]
            for w in combos:
                vec = [F.zero()] * ni
                for coef, v in zip(w, img):
                    if F.is_zero(coef):
                        continue
                    for t in range(ni):
                        vec[t] = F.add(vec[t], F.mul(coef, v[nprefix + t]))
                if any(not F.is_zero(c) for c in vec):
                    B.append(vec)
    return Z, fillers, _rref_span(B, F)


def compute_pages(fc: FilteredComplex, max_p=None):
    """Pages p = 0 .. P+1 with differentials and deterministic bases."""
    F = fc.F
    P = fc.P
    max_p = P + 1 if max_p is None else max_p
    pages = []
    for p in range(max_p + 1):
        pg = Page(p)
        for i in range(P + 1):
            ni = fc.dims[i]
            if p == 0:
                Z = [[F.one() if a == b else F.zero() for b in range(ni)] for a in range(ni)]
                fillers = [[] for _ in range(ni)]
                B = []
            else:
                Z, fillers, B = _zb_for(fc, i, p)
            pg.Z[i] = Z
            pg.fillers[i] = fillers if p > 0 else [[] for _ in Z]
            pg.B[i] = B
            # quotient representatives: Z-vectors adding pivots beyond B
            reps = []
            span = _IncSpan(F, seed=B)
            for z, fill in zip(Z, pg.fillers[i]):
                if span.try_add(z):
                    reps.append((z, fill))
            pg.reps[i] = reps
            pg.dims[i] = len(reps)
        # differentials
        for i in range(P + 1):
            tgt = i + p
            if tgt > P or pg.dims[i] == 0:
                continue
            cols_out = []
            for z, fill in pg.reps[i]:
                y = _apply_bottom_row(fc, i, p, z, fill)
                cols_out.append(_class_coords(pg, tgt, y, F))
            pg.D[i] = la.transpose(cols_out) if cols_out else []
        pages.append(pg)
    return pages


def _apply_bottom_row(fc, i, p, x, filler):
    """(d_{i+p,i} ... d_{i+p,i+p-1}) applied to (x; filler) in V_{i+p} coords."""
    F = fc.F
    tgt = i + p
    out = [F.zero()] * fc.dims[tgt]
    segs = [(i, x)]
    off = 0
    for m in range(i + 1, min(i + p, fc.P + 1)):
        segs.append((m, filler[off : off + fc.dims[m]]))
        off += fc.dims[m]
    if p == 0:
        segs = [(i, x)]
    for (c, vec) in segs:
        blk = fc.block(tgt, c)
        for r in range(fc.dims[tgt]):
            acc = out[r]
            row = blk[r]
            for cc, v in enumerate(vec):
                if not F.is_zero(v):
                    acc = F.add(acc, F.mul(row[cc], v))
            out[r] = acc
    return out


def _class_coords(pg, i, y, F):
    """Coordinates of [y] in the quotient representatives of page pg at i."""
    B = pg.B[i]
    reps = [r for r, _ in pg.reps[i]]
    if not reps:
        if B:
            sol = la.solve(la.transpose(B), y, F)
            if sol is None:
                raise ComplexError("differential image leaves the cycle space")
        elif any(not F.is_zero(v) for v in y):
            raise ComplexError("differential image leaves the cycle space")
        return []
    M = la.transpose(B + reps)
    sol = la.solve(M, y, F)
    if sol is None:
        raise ComplexError("differential image is not a cycle class")
    return sol[len(B):]


def page_homology_dims(fc: FilteredComplex, pages, p):
    """Homology dims of page p (must equal the dims of page p+1)."""
    F = fc.F
    pg = pages[p]
    out = {}
    for i in range(fc.P + 1):
        n = pg.dims.get(i, 0)
        Dout = pg.D.get(i)
        rk_out = la.rank(Dout, F) if Dout else 0
        src = i - p
        Din = pg.D.get(src) if src >= 0 else None
        rk_in = la.rank(Din, F) if Din else 0
        out[i] = n - rk_out - rk_in
    return out


def last_page_dims(fc: FilteredComplex, pages=None):
    pages = pages if pages is not None else compute_pages(fc)
    return [pages[-1].dims[i] for i in range(fc.P + 1)]


def direct_homology_gr(fc: FilteredComplex):
    """Dims of Gr H(d) by deepest-representative level; the independent oracle."""
    F = fc.F
    D = fc.full_matrix()
    ker = la.nullspace(D, F)
    img = _rref_span(la.transpose(D), F)
    dims_ge = []
    for i in range(fc.P + 2):
        off = fc.offsets[min(i, fc.P + 1)]
        if ker and off:
            prefix = [v[:off] for v in ker]
            combos = la.nullspace(la.transpose(prefix), F)
            Ki = []
            for w in combos:
                vec = [F.zero()] * fc.N
                for coef, v in zip(w, ker):
                    if F.is_zero(coef):
                        continue
                    for t in range(fc.N):
                        vec[t] = F.add(vec[t], F.mul(coef, v[t]))
                Ki.append(vec)
            Ki = _rref_span(Ki, F)
        else:
            Ki = _rref_span(ker, F)
        inter = la.intersect_rowspaces(Ki, img, F) if Ki and img else []
        dims_ge.append(len(Ki) - len(inter))
    return [dims_ge[i] - dims_ge[i + 1] for i in range(fc.P + 1)]


def first_pages_shortcut(fc: FilteredComplex, pages=None):
    """The pseudo-inverse form of the differentials on pages 0..2, expressed
    in the same subquotient coordinates as compute_pages for comparison."""
    F = fc.F
    pages = pages if pages is not None else compute_pages(fc, max_p=3)
    h = {i: la.pseudo_identity(fc.block(i, i), F) for i in range(fc.P + 1)}
    out = {0: {}, 1: {}, 2: {}}
    for i in range(fc.P + 1):
        out[0][i] = fc.block(i, i)
    for i in range(fc.P):
        out[1][i] = fc.block(i + 1, i)
    for i in range(fc.P - 1):
        d20 = fc.block(i + 2, i)
        if fc.dims[i + 1] == 0:
            out[2][i] = d20
            continue
        corr = la.matmul(
            la.matmul(fc.block(i + 2, i + 1), h[i + 1], F), fc.block(i + 1, i), F
        )
        out[2][i] = [
            [F.sub(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(d20, corr)
        ]
    # induced maps on the subquotients of pages 1 and 2
    induced = {1: {}, 2: {}}
    for p in (1, 2):
        pg = pages[p]
        for i in range(fc.P + 1 - p):
            if pg.dims.get(i, 0) == 0:
                continue
            cols = []
            M = out[p][i]
            for z, _ in pg.reps[i]:
                y = la.matvec(M, z, F)
                cols.append(_class_coords(pg, i + p, y, F))
            induced[p][i] = la.transpose(cols) if cols else []
    return out, induced


def shortcut_matches_pages(fc: FilteredComplex, pages=None):
    pages = pages if pages is not None else compute_pages(fc)
    _, induced = first_pages_shortcut(fc, pages)
    F = fc.F
    for p in (1, 2):
        for i, M in induced[p].items():
            ref = pages[p].D.get(i, [])
            A = M or []
            Bm = ref or []
            ra = [[x for x in row] for row in A]
            rb = [[x for x in row] for row in Bm]
            if len(ra) != len(rb) or any(
                not F.is_zero(F.sub(a, b))
                for rowa, rowb in zip(ra, rb)
                for a, b in zip(rowa, rowb)
            ):
                return False
    return True


def refill_and_compare(fc: FilteredComplex, pages, seed=0):
    """Recompute page differentials with randomized fillers; must agree."""
    F = fc.F
    rng = _random.Random(seed)
    for p in range(1, fc.P + 2):
        pg = pages[p]
        for i in range(fc.P + 1):
            if pg.dims.get(i, 0) == 0 or i + p > fc.P:
                continue
            mids = list(range(i + 1, min(i + p, fc.P + 1)))
            cols = [i] + mids
            rows = list(range(i, min(i + p, fc.P + 1)))
            M = _sub_rows(fc, rows, cols, None)
            ni = fc.dims[i]
            cols_out = []
            for z, fill in pg.reps[i]:
                sol_space = la.nullspace(M, F) if M and M[0] else []
                y0 = _apply_bottom_row(fc, i, p, z, fill)
                base = _class_coords(pg, i + p, y0, F)
                # add a random kernel element with zero x-part
                zkern = [v for v in sol_space if all(F.is_zero(c) for c in v[:ni])]
                if zkern:
                    pick = zkern[rng.randrange(len(zkern))]
                    y1 = _apply_bottom_row(fc, i, p, [F.zero()] * ni, pick[ni:])
                    alt = _class_coords(pg, i + p, [F.add(a, b) for a, b in zip(y0, y1)], F)
                else:
                    alt = base
                if any(not F.is_zero(F.sub(a, b)) for a, b in zip(base, alt)):
                    return False
                cols_out.append(base)
    return True


def page_dims_by_hdeg(fc: FilteredComplex, pages):
    """Per (filtration level, hdeg) dims of every page; needs hdeg labels."""
    if fc.hdeg is None:
        raise ComplexError("complex carries no homological grading")
    F = fc.F
    out = []
    for pg in pages:
        tab = {}
        for i in range(fc.P + 1):
            off = fc.offsets[i]
            labels = fc.hdeg[off : off + fc.dims[i]]
            hs = sorted(set(labels))
            for h in hs:
                colsel = [c for c, lab in enumerate(labels) if lab == h]
                # dims of the h-slice of the subquotient: rank of reps
                # restricted-to-slice modulo B-slice
                Bh = [[v[c] for c in colsel] for v in pg.B[i]
                      if all(F.is_zero(v[c]) for c in range(fc.dims[i]) if c not in colsel)]
                reps_h = [
                    [z[c] for c in colsel]
                    for z, _ in pg.reps[i]
                    if all(F.is_zero(z[c]) for c in range(fc.dims[i]) if c not in colsel)
                ]
                n = la.rank(Bh + reps_h, F) - la.rank(Bh, F) if (Bh or reps_h) else 0
                if n:
                    tab[(i, h)] = n
        out.append(tab)
    return out
