"""Exact dense linear algebra over the rationals and prime fields.

Matrices are lists of lists of field scalars.  Row reduction uses a
deterministic first-nonzero pivot rule so subquotient bases and pseudo-inverse
choices are reproducible run to run.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = Fraction


class QQ:
    """Rational field operations."""

    name = "QQ"

    @staticmethod
    def of(x):
        return _mpq(x)

    zero = staticmethod(lambda: _mpq(0))
    one = staticmethod(lambda: _mpq(1))

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def is_zero(a):
        return a == 0


class GF:
    """Prime field GF(p)."""

    def __init__(self, p: int):
        self.p = p
        self.name = f"GF({p})"

    def of(self, x):
        if isinstance(x, Fraction) or hasattr(x, "numerator"):
            num = int(x.numerator) % self.p
            den = int(x.denominator) % self.p
            return num * pow(den, -1, self.p) % self.p
        return int(x) % self.p

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def div(self, a, b):
        return a * pow(b, -1, self.p) % self.p

    def neg(self, a):
        return (-a) % self.p

    def is_zero(self, a):
        return a % self.p == 0


def mat(rows, F=QQ):
    return [[F.of(x) for x in row] for row in rows]


def zeros(m, n, F=QQ):
    return [[F.zero() for _ in range(n)] for _ in range(m)]


def eye(n, F=QQ):
    M = zeros(n, n, F)
    for i in range(n):
        M[i][i] = F.one()
    return M


def shape(A):
    return len(A), len(A[0]) if A else 0


def matmul(A, B, F=QQ):
    m, k = shape(A)
    k2, n = shape(B)
    if k != k2:
        # zero-dimensional blocks are stored as empty lists and lose their
        # nominal shape; any product through them is zero
        if k == 0 or k2 == 0 or m == 0 or n == 0:
            return zeros(m, n, F)
        raise ValueError(f"shape mismatch: {m}x{k} times {k2}x{n}")
    out = zeros(m, n, F)
    for i in range(m):
        Ai = A[i]
        for l in range(k):
            a = Ai[l]
            if F.is_zero(a):
                continue
            Bl = B[l]
            Oi = out[i]
            for j in range(n):
                Oi[j] = F.add(Oi[j], F.mul(a, Bl[j]))
    return out


def matvec(A, v, F=QQ):
    return [
        _dot(row, v, F)
        for row in A
    ]


def _dot(row, v, F):
    s = F.zero()
    for a, b in zip(row, v):
        if not F.is_zero(a):
            s = F.add(s, F.mul(a, b))
    return s


def transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def hstack(A, B):
    return [ra + rb for ra, rb in zip(A, B)]


def rref(A, F=QQ):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = [row[:] for row in A]
    m, n = shape(R)
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if not F.is_zero(R[i][c])), None)
        if pr is None:
            continue
        R[r], R[pr] = R[pr], R[r]
        inv = F.div(F.one(), R[r][c])
        R[r] = [F.mul(inv, x) for x in R[r]]
        for i in range(m):
            if i != r and not F.is_zero(R[i][c]):
                f = R[i][c]
                R[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def rank(A, F=QQ):
    if not A or not A[0]:
        return 0
    return len(rref(A, F)[1])


def nullspace(A, F=QQ):
    """Basis of the right kernel, one vector per free column."""
    m, n = shape(A)
    if m == 0:
        return [[F.one() if j == i else F.zero() for j in range(n)] for i in range(n)]
    R, pivots = rref(A, F)
    pivot_set = set(pivots)
    basis = []
    free = [c for c in range(n) if c not in pivot_set]
    for fc in free:
        v = [F.zero()] * n
        v[fc] = F.one()
        for r, pc in enumerate(pivots):
            v[pc] = F.neg(R[r][fc])
        basis.append(v)
    return basis


def solve(A, b, F=QQ):
    """One particular solution of A x = b (free vars zero) or None."""
    m, n = shape(A)
    Ab = [row[:] + [bv] for row, bv in zip(A, b)]
    R, pivots = rref(Ab, F)
    for row in R:
        if all(F.is_zero(x) for x in row[:-1]) and not F.is_zero(row[-1]):
            return None
    x = [F.zero()] * n
    for r, pc in enumerate(pivots):
        if pc == n:
            return None
        x[pc] = R[r][n]
    return x


def solve_matrix(A, B, F=QQ):
    """Solve A X = B columnwise; None if any column is inconsistent."""
    cols = transpose(B)
    xs = []
    for c in cols:
        x = solve(A, c, F)
        if x is None:
            return None
        xs.append(x)
    return transpose(xs) if xs else [[] for _ in range(shape(A)[1])]


def column_space_basis(A, F=QQ):
    """Indices of a deterministic set of independent columns."""
    _, pivots = rref(A, F)
    return pivots


def inverse(A, F=QQ):
    m, n = shape(A)
    assert m == n
    R, pivots = rref(hstack(A, eye(n, F)), F)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def pseudo_identity(A, F=QQ):
    """g with A g A = A, via rank factorization (any field)."""
    m, n = shape(A)
    if rank(A, F) == 0:
        return zeros(n, m, F)
    R, pivots = rref(A, F)
    r = len(pivots)
    C = [[A[i][c] for c in pivots] for i in range(m)]  # m x r, full column rank
    Rr = R[:r]  # r x n, full row rank, pivot columns are identity
    # left inverse of C: invert an independent r x r row block
    Rt, rowpiv = rref(transpose(C), F)
    block = [[C[i][j] for j in range(r)] for i in rowpiv]
    binv = inverse(block, F)
    Cplus = zeros(r, m, F)
    for j, i in enumerate(rowpiv):
        for k in range(r):
            Cplus[k][i] = binv[k][j]
    # right inverse of Rr: indicator on pivot columns
    Rplus = zeros(n, r, F)
    for k, c in enumerate(pivots):
        Rplus[c][k] = F.one()
    return matmul(Rplus, Cplus, F)


def intersect_rowspaces(A, B, F=QQ):
    """Basis of rowspace(A) ∩ rowspace(B)."""
    if not A or not B:
        return []
    na = len(A)
    stacked = [row[:] for row in A] + [row[:] for row in B]
    ker = nullspace(transpose(stacked), F)
    out = []
    n = shape(A)[1]
    for v in ker:
        vec = [F.zero()] * n
        nonzero = False
        for i in range(na):
            if not F.is_zero(v[i]):
                nonzero = True
                for j in range(n):
                    vec[j] = F.add(vec[j], F.mul(v[i], A[i][j]))
        if nonzero and any(not F.is_zero(x) for x in vec):
            out.append(vec)
    R, piv = rref(out, F) if out else ([], [])
    return [R[i] for i in range(len(piv))]


def in_rowspace(A, v, F=QQ):
    return solve(transpose(A), v, F) is not None if A else all(F.is_zero(x) for x in v)
