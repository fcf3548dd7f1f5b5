"""Order-by-order power-series solution of the constraint equations.

Boundary data lives on the hypersurface x1 = 0; the solver integrates the
quasilinear system in the x1 direction one degree at a time.  D_1 = d/dx1 is
fixed, the frame components D_2, D_3, the structure functions c_23, and the
scalars a, u, xi are the unknowns; c_31 and c_12 are free input germs.
The [D_2, D_3] structure equation is imposed only on the initial surface and
must propagate; `constraint_residuals` on the output checks exactly that.
"""

from __future__ import annotations

from .gauge import CYCLIC, ConstraintData, GaugeError, solve3
from .jets import Jet, jet_exp, jet_inv
from .scalars import RATIONAL, coerce


class CkError(ValueError):
    pass


class GermData:
    """Free boundary data: six full germs c31^i, c12^i and nine 2-variable
    germs (in x2, x3) for D2^i, D3^i, a, u, xi; all jets of one order."""

    def __init__(self, c31, c12, d2, d3, a, u, xi, base, field, order):
        self.c31 = c31
        self.c12 = c12
        self.d2 = d2
        self.d3 = d3
        self.a = a
        self.u = u
        self.xi = xi
        self.base = tuple(base)
        self.field = field
        self.order = order

    def positivity_ok(self):
        d21, d31, u0 = self.d2[1].const_term(), self.d3[1].const_term(), self.u.const_term()
        return all(float(v) > 0 for v in (d21, d31, u0))


def _x1_coeff(jet: Jet, m: int) -> Jet:
    return jet.axis_coefficients("x1").get(
        m, Jet.zero(jet.base, jet.field, jet.order)
    )


def _lift(jet: Jet, m: int, order) -> Jet:
    """(x1)^m * jet, truncated at the working order."""
    return jet.mul_axis_power("x1", m, order)


def ck_solve(d: GermData) -> ConstraintData:
    """Unique jet solution extending the boundary germs; see module docstring."""
    N = d.order
    base, field = d.base, d.field
    zero = lambda: Jet.zero(base, field, N)  # noqa: E731
    one = Jet.constant(1, base, field, N)

    if any(m[0] != 0 for g in (*d.d2.values(), *d.d3.values(), d.a, d.u, d.xi) for m in g.coeffs):
        raise CkError("boundary germs must not depend on t")
    if any(m[1] != 0 for g in (*d.d2.values(), *d.d3.values(), d.a, d.u, d.xi) for m in g.coeffs):
        raise CkError("boundary germs must not depend on x1")

    # unknowns, extended degree by degree in x1
    D2 = {k: d.d2[k].truncate(N) for k in (1, 2, 3)}
    D3 = {k: d.d3[k].truncate(N) for k in (1, 2, 3)}
    c23 = [zero(), zero(), zero()]
    a, u, xi = d.a.truncate(N), d.u.truncate(N), d.xi.truncate(N)

    c31 = [j.truncate(N) for j in d.c31]
    c12 = [j.truncate(N) for j in d.c12]

    def frame():
        return {
            1: {1: one, 2: zero(), 3: zero()},
            2: {1: D2[1], 2: D2[2], 3: D2[3]},
            3: {1: D3[1], 2: D3[2], 3: D3[3]},
        }

    def c_full():
        return {(2, 3): list(c23), (3, 1): list(c31), (1, 2): list(c12)}

    def c_of(cd, j, k, i):
        if j == k:
            return zero()
        return cd[(j, k)][i - 1] if (j, k) in cd else -cd[(k, j)][i - 1]

    def dspatial(fr, i, f):
        out = None
        for k in (1, 2, 3):
            co = fr[i][k]
            if co.is_zero(0.0):
                continue
            term = co * f.derive(k)
            out = term if out is None else out + term
        return out if out is not None else zero()

    def g_triple():
        ea = jet_exp(a)
        uinv = jet_inv(u)
        half = coerce(1, field) / coerce(2, field) if field == RATIONAL else 0.5
        g1 = ea.scale(half)
        g2 = -(ea * (one + u)).scale(half)
        g3 = -(ea * (one + uinv)).scale(half)
        return {1: g1, 2: g2, 3: g3}, ea, uinv

    for m in range(N):
        fr = frame()
        # frame increments from the [D_3, D_1] and [D_1, D_2] equations
        incr2, incr3 = {}, {}
        for k in (1, 2, 3):
            rhs2 = c12[0] * fr[1][k] + c12[1] * fr[2][k] + c12[2] * fr[3][k]
            rhs3 = c31[0] * fr[1][k] + c31[1] * fr[2][k] + c31[2] * fr[3][k]
            incr2[k] = _x1_coeff(rhs2, m)
            incr3[k] = -_x1_coeff(rhs3, m)
        inv_m1 = coerce(1, field) / coerce(m + 1, field) if field == RATIONAL else 1.0 / (m + 1)
        for k in (1, 2, 3):
            D2[k] = D2[k] + _lift(incr2[k].scale(inv_m1), m + 1, N)
            D3[k] = D3[k] + _lift(incr3[k].scale(inv_m1), m + 1, N)

        if m == 0:
            # boundary values of c_23 from [D_2, D_3] = sum c_23^p D_p at x1 = 0
            fr = frame()
            comm = {}
            for k in (1, 2, 3):
                comm[k] = dspatial(fr, 2, fr[3][k]) - dspatial(fr, 3, fr[2][k])
            M = [[_x1_coeff(fr[i][mm], 0) for i in (1, 2, 3)] for mm in (1, 2, 3)]
            rhs = [_x1_coeff(comm[mm], 0) for mm in (1, 2, 3)]
            try:
                sol = solve3(M, rhs, base, field)
            except GaugeError as e:
                raise CkError(f"boundary frame solve failed: {e}") from e
            c23 = [s for s in sol]

        # c_23 increment from the Jacobi consequence
        fr = frame()
        cd = c_full()
        for qi in range(3):
            q = qi + 1
            rest = None
            for i, j, k in CYCLIC:
                grp = None
                for p in (1, 2, 3):
                    term = c_of(cd, j, k, p) * c_of(cd, i, p, q)
                    grp = term if grp is None else grp + term
                if i == 1:
                    pass  # D_1(c_23^q) is the solved-for derivative
                else:
                    grp = grp + dspatial(fr, i, c_of(cd, j, k, q))
                rest = grp if rest is None else rest + grp
            incr = -_x1_coeff(rest, m)
            c23[qi] = c23[qi] + _lift(incr.scale(inv_m1), m + 1, N)

        # scalar increments from the three mce2 equations
        fr = frame()
        cd = c_full()
        g, ea, uinv = g_triple()
        du_g = {
            1: -(ea * (one - uinv * uinv)).scale(
                coerce(1, field) / coerce(2, field) if field == RATIONAL else 0.5
            ),
            2: (ea * uinv * uinv).scale(
                coerce(1, field) / coerce(2, field) if field == RATIONAL else 0.5
            ),
            3: -ea.scale(coerce(1, field) / coerce(2, field) if field == RATIONAL else 0.5),
        }  # d/du of (g_j + g_k) for i = 1, 2, 3
        rows = []
        rhs = []
        degenerate_rows = []
        for i, j, k in CYCLIC:
            Di1 = _x1_coeff(fr[i][1], 0)
            gsum = g[j] + g[k]
            row = [
                Di1 * _x1_coeff(gsum, 0),
                Di1 * _x1_coeff(du_g[i], 0),
                (Di1 * _x1_coeff(g[i], 0)).scale(-2),
            ]
            # full residual with the current (partial) jets; its x1-degree-m
            # part is -M0 * w_m
            R = dspatial(fr, i, gsum)
            R = R + c_of(cd, i, j, j) * (g[i] - g[j])
            R = R + c_of(cd, i, k, k) * (g[i] - g[k])
            R = R - (dspatial(fr, i, xi) * g[i]).scale(2)
            rows.append(row)
            rhs.append(-_x1_coeff(R, m))
            if all(x.is_zero(0.0) for x in row):
                degenerate_rows.append(len(rows) - 1)
        try:
            if degenerate_rows:
                raise GaugeError("degenerate rows")
            w = solve3(rows, rhs, base, field)
        except GaugeError:
            # rows with D_i^1 = 0 on the surface become consistency conditions
            w = _solve_degenerate(rows, rhs, degenerate_rows, base, field)
        a = a + _lift(w[0].scale(inv_m1), m + 1, N)
        u = u + _lift(w[1].scale(inv_m1), m + 1, N)
        xi = xi + _lift(w[2].scale(inv_m1), m + 1, N)

    fr = frame()
    cd = ConstraintData(
        g_triple()[0],
        fr,
        xi,
        base,
        field,
        c={(2, 3): list(c23), (3, 1): list(c31), (1, 2): list(c12)},
    )
    return cd


def _solve_degenerate(rows, rhs, degenerate_rows, base, field):
    """Deterministic fallback when some D_i^1 vanish identically on x1 = 0.

    Degenerate rows must be consistent (zero right side); surviving rows are
    solved with the later unknowns set to zero.  Covers, in particular,
    boundary frames tangent to the surface like D_2 = d2, D_3 = d3.
    """
    live = [r for r in range(3) if r not in degenerate_rows]
    for r in degenerate_rows:
        if not rhs[r].is_zero(0.0 if field == RATIONAL else 1e-12):
            raise CkError(
                "quasilinear system is degenerate at the base point and inconsistent"
            )
    zero = Jet.zero(base, field, rhs[0].order)
    w = [zero, zero, zero]
    if not live:
        return w
    if len(live) == 1:
        r = live[0]
        col = next((c for c in range(3) if not rows[r][c].is_zero(0.0)), None)
        if col is None:
            if rhs[r].is_zero(0.0 if field == RATIONAL else 1e-12):
                return w
            raise CkError("degenerate quasilinear row is inconsistent")
        w[col] = rhs[r] * jet_inv(rows[r][col])
        return w
    raise CkError(
        "quasilinear system has an unsupported degeneracy pattern at the base point"
    )


def boundary_restriction(cd: ConstraintData):
    """x1 = 0 restrictions of the solved unknowns (for the section check)."""
    out = {}
    for i in (2, 3):
        for k in (1, 2, 3):
            out[f"D{i}^{k}"] = _x1_coeff(cd.frame[i][k], 0)
    out["xi"] = _x1_coeff(cd.xi, 0)
    return out
