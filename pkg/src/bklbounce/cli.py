"""Command-line front end.

Every subcommand emits a machine-readable run report (JSON) with one
name/status/residual line per check; the exit status is 0 iff every check
passed.  Orbit and residual-vs-t data are emitted as CSV for external
tooling; nothing is plotted here.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction

from .algebra import decompose_graded, filtration_degree, get_algebra
from .scalars import DEFAULT_TOL, FLOAT, RATIONAL


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


class RunReport:
    def __init__(self, command, inputs):
        self.command = command
        self.inputs_digest = _digest(inputs)
        self.checks = []
        self.outputs = {}
        self.t0 = time.time()

    def check(self, name, passed, residual=None):
        entry = {"name": name, "status": "pass" if passed else "fail"}
        if residual is not None:
            entry["residual"] = float(residual)
        self.checks.append(entry)
        return passed

    def finish(self):
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "checks": self.checks,
            "outputs": self.outputs,
            "elapsed_s": round(time.time() - self.t0, 3),
        }

    @property
    def ok(self):
        return all(c["status"] == "pass" for c in self.checks)


def _emit(report: RunReport, out_path):
    doc = report.finish()
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if report.ok else 1


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def cmd_decompose(args):
    from .jsonio import element_from_json, element_to_json

    obj = _load_json(args.input)
    rep = RunReport("decompose", obj)
    el = element_from_json(obj, args.field)
    ge = decompose_graded(el, get_algebra(), strict=False, tol=args.tol)
    comps = {}
    for alpha, part in ge.by_alpha(args.tol if args.field == FLOAT else 0.0).items():
        key = "".join(str(a) for a in alpha)
        comps[key] = element_to_json(ge.component(alpha))
    rep.outputs["components"] = comps
    rep.outputs["degrees"] = {
        "1-index": filtration_degree(ge, "1-index"),
        "2-index": filtration_degree(ge, "2-index"),
        "3-index": filtration_degree(ge, "3-index"),
    }
    resid = max((j.max_abs() for j in ge.ideal_part.values()), default=0.0)
    rep.check("in-basis-span", resid <= args.tol, resid)
    return _emit(rep, args.out)


def cmd_bracket(args):
    from .elements import bracket
    from .jsonio import element_from_json, element_to_json

    obj = _load_json(args.input)
    rep = RunReport("bracket", obj)
    a = element_from_json(obj["a"], args.field)
    b = element_from_json(obj["b"], args.field)
    ge = decompose_graded(bracket(a, b, get_algebra().conv), get_algebra())
    rep.outputs["bracket"] = element_to_json(ge.reassemble())
    rep.outputs["support"] = ["".join(map(str, al)) for al in ge.support(args.tol)]
    rep.check("computed", True)
    return _emit(rep, args.out)


def cmd_mc_residual(args):
    from .gauge import assemble_gauge, mc_residual
    from .jsonio import gauge_params_from_json

    obj = _load_json(args.input)
    rep = RunReport("mc-residual", {"input": obj, "mode": args.mode})
    params = gauge_params_from_json(obj, args.field)
    x = assemble_gauge(params, args.mode, get_algebra())
    res = mc_residual(x, args.mode, get_algebra())
    norms = {}
    for key, ge in res.items():
        norms["".join(str(v) for v in key)] = ge.max_abs()
    rep.outputs["residual_norms"] = norms
    worst = max(norms.values(), default=0.0)
    rep.check("maurer-cartan", worst <= args.tol, worst)
    return _emit(rep, args.out)


def cmd_solve_constraints(args):
    from .gauge import constraint_residuals
    from .jsonio import constraint_data_to_json, germ_data_from_json

    obj = _load_json(args.input)
    rep = RunReport("solve-constraints", {"input": obj, "order": args.order})
    from .cksolver import ck_solve

    germ = germ_data_from_json(obj, args.field, args.order)
    cd = ck_solve(germ)
    res = constraint_residuals(cd)
    worst = max(v.truncate(args.order - 1).max_abs() for v in res.values())
    rep.check("constraint-residuals", worst <= args.tol, worst)
    rep.outputs["constraint_data"] = constraint_data_to_json(cd)
    return _emit(rep, args.out)


def cmd_verify_bounce(args):
    from .bounce import bounce_solution, normalize
    from .cksolver import ck_solve
    from .fixtures import homogeneous_normal_form
    from .gauge import assemble_gauge, constraint_residuals, mc_residual, residual_max_abs
    from .jsonio import germ_data_from_json

    if args.input:
        obj = _load_json(args.input)
        rep = RunReport("verify-bounce", obj)
        germ = germ_data_from_json(obj, args.field, args.order)
        cd = ck_solve(germ)
        nf, *_ = normalize(cd)
    else:
        rep = RunReport("verify-bounce", {"fixture": "homogeneous-u3", "field": args.field})
        nf = homogeneous_normal_form(3, field=args.field, order=args.order)
    res_c = constraint_residuals(nf.cd)
    worst_c = max(v.truncate(args.order - 2).max_abs() for v in res_c.values())
    rep.check("normal-form-constraints", worst_c <= args.tol, worst_c)
    sol = bounce_solution(nf)
    x = assemble_gauge(sol.params, "bounce", get_algebra())
    res = mc_residual(x, "bounce", get_algebra())
    worst = residual_max_abs(res)
    rep.check("bounce-mc-residual", worst <= args.tol, worst)
    free = mc_residual(x, "free", get_algebra())
    rep.outputs["free_mode_residual"] = residual_max_abs(free)
    return _emit(rep, args.out)


def cmd_orbit(args):
    from .bounce import kasner_u_orbit

    rep = RunReport("orbit", {"u0": args.u0, "steps": args.steps})
    u0 = Fraction(args.u0) if "/" in args.u0 or args.field == RATIONAL else float(args.u0)
    vals, reason = kasner_u_orbit(u0, args.steps)
    lines = ["step,u"] + [f"{i},{v}" for i, v in enumerate(vals)]
    csv = "\n".join(lines) + f"\n# termination: {reason}\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    rep.outputs["termination"] = reason
    rep.outputs["values"] = [str(v) for v in vals]
    rep.check("orbit-computed", True)
    doc = rep.finish()
    print(json.dumps({"checks": doc["checks"], "termination": reason}, sort_keys=True), file=sys.stderr)
    return 0


def cmd_verify_auto(args):
    from .bounce import scale_transform
    from .cksolver import ck_solve
    from .elements import bracket
    from .fixtures import random_germ_data
    from .gauge import assemble_gauge, mc_residual, residual_is_zero, params_from_constraint_data
    from .jets import Jet
    from .morphisms import (GroupoidMorphism, apply_groupoid_morphism,
                            scale_factorization_sides, selement_difference)

    rep = RunReport("verify-auto", {"seed": args.seed})
    rng = random.Random(args.seed)
    A = get_algebra()
    base = (0.0, 0.1, -0.2, 0.3)
    d = random_germ_data(base=base, order=4, rng=rng, amplitude=0.08)
    cd = ck_solve(d)

    def xjet(c0, amp=0.1):
        coeffs = {(0, 0, 0, 0): c0}
        for m in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)):
            coeffs[m] = rng.uniform(-amp, amp)
        return Jet.from_coeffs(coeffs, base, FLOAT, 4)

    Aj, Bj = xjet(1.2), xjet(0.9)
    lhs, rhs = scale_factorization_sides(cd, Aj, Bj, -1, A)
    diff = selement_difference(lhs, rhs)
    rep.check("three-step-factorization", diff <= args.tol, diff)

    m = GroupoidMorphism(xjet(1.1), xjet(0.2), xjet(1.3))
    ea = A.basis_element(rng.randrange(144), base, FLOAT).mul_jet(xjet(0.7))
    eb = A.basis_element(rng.randrange(144), base, FLOAT).mul_jet(xjet(-0.4))
    lhs_e = apply_groupoid_morphism(m, bracket(ea, eb, A.conv))
    rhs_e = bracket(apply_groupoid_morphism(m, ea), apply_groupoid_morphism(m, eb), A.conv)
    dd = (lhs_e - rhs_e).compress(0.0).max_abs()
    rep.check("groupoid-bracket-equivariance", dd <= args.tol, dd)

    x = assemble_gauge(params_from_constraint_data(cd), "free", A)
    r = mc_residual(x, "free", A)
    rep.check("mc-preserved-under-data", residual_is_zero(r, args.tol))
    return _emit(rep, args.out)


def cmd_specseq(args):
    from .linalg import GF, QQ
    from .specseq import (FilteredComplex, compute_pages, direct_homology_gr,
                          last_page_dims)

    obj = _load_json(args.input)
    rep = RunReport("specseq", obj)
    field = QQ if args.field != "gf7" else GF(7)
    fc = FilteredComplex.from_json(obj, field=field)
    pages = compute_pages(fc)
    per_page = []
    for pg in pages:
        dims = [pg.dims[i] for i in range(fc.P + 1)]
        ranks = {}
        for i, M in pg.D.items():
            from . import linalg as la

            ranks[str(i)] = la.rank(M, field) if M else 0
        per_page.append({"p": pg.p, "dims": dims, "differential_ranks": ranks})
    rep.outputs["pages"] = per_page
    lp = last_page_dims(fc, pages)
    gr = direct_homology_gr(fc)
    rep.outputs["last_page"] = lp
    rep.outputs["gr_homology"] = gr
    rep.check("last-page-equals-gr-homology", lp == gr)
    return _emit(rep, args.out)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="bklbounce",
        description="Frame-algebra computer algebra: decompositions, MC residuals, "
        "constraint solving, bounce verification, spectral sequences.",
    )
    ap.add_argument("--order", type=int, default=6, help="jet truncation order")
    ap.add_argument("--tol", type=float, default=DEFAULT_TOL)
    ap.add_argument("--field", default="float", choices=["rational", "float", "gf7"])
    ap.add_argument("--out", default=None, help="write the report/output here")
    ap.add_argument("--seed", type=int, default=0)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("decompose", help="graded components of an element")
    p.add_argument("input")
    p.set_defaults(func=cmd_decompose)
    p = sub.add_parser("bracket", help="bracket of two elements")
    p.add_argument("input")
    p.set_defaults(func=cmd_bracket)
    p = sub.add_parser("mc-residual", help="Maurer-Cartan residual of gauge data")
    p.add_argument("input")
    p.add_argument("--mode", default="free", choices=["E", "free", "bounce"])
    p.set_defaults(func=cmd_mc_residual)
    p = sub.add_parser("solve-constraints", help="power-series constraint solve")
    p.add_argument("input")
    p.set_defaults(func=cmd_solve_constraints)
    p = sub.add_parser("verify-bounce", help="residual report for the bounce element")
    p.add_argument("input", nargs="?", default=None)
    p.set_defaults(func=cmd_verify_bounce)
    p = sub.add_parser("orbit", help="Kasner u-parameter orbit as CSV")
    p.add_argument("--u0", required=True)
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(func=cmd_orbit)
    p = sub.add_parser("verify-auto", help="automorphism verification suite")
    p.set_defaults(func=cmd_verify_auto)
    p = sub.add_parser("specseq", help="spectral sequence of a filtered complex")
    p.add_argument("input")
    p.set_defaults(func=cmd_specseq)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    field_map = {"rational": RATIONAL, "float": FLOAT, "gf7": "gf7"}
    args.field = field_map.get(args.field, args.field)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
