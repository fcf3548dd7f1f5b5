"""JSON schemas for jets, elements, gauge parameters, germ data, and
constraint data.  All scalars travel as strings ("3/4" or a float repr) so
exact data survives the round trip.
"""

from __future__ import annotations

from .cksolver import GermData
from .elements import Element
from .gauge import ConstraintData, GaugeParams
from .jets import Jet
from .scalars import FLOAT, RATIONAL, scalar_to_str


def jet_to_json(j: Jet):
    return j.to_json()


def jet_from_json(obj, field):
    return Jet.from_json(obj, field)


def element_to_json(e: Element):
    return e.to_json()


def element_from_json(obj, field):
    return Element.from_json(obj, field)


def gauge_params_to_json(p: GaugeParams):
    return {
        "field": p.field,
        "base": [scalar_to_str(b, p.field) if p.field == RATIONAL else repr(float(b)) for b in p.base],
        "beta": {str(i): [jet_to_json(j) for j in p.beta[i]] for i in (1, 2, 3)},
        "gamma": {str(i): [jet_to_json(j) for j in p.gamma[i]] for i in (1, 2, 3)},
        "mu": {str(i): jet_to_json(p.mu[i]) for i in (1, 2, 3)},
        "frame": {
            str(i): {str(k): jet_to_json(p.frame[i][k]) for k in (1, 2, 3)}
            for i in (1, 2, 3)
        },
    }


def gauge_params_from_json(obj, field=None):
    field = field or obj.get("field", RATIONAL)
    beta = {int(i): [jet_from_json(j, field) for j in js] for i, js in obj["beta"].items()}
    gamma = {int(i): [jet_from_json(j, field) for j in js] for i, js in obj["gamma"].items()}
    mu = {int(i): jet_from_json(j, field) for i, j in obj["mu"].items()}
    frame = {
        int(i): {int(k): jet_from_json(j, field) for k, j in row.items()}
        for i, row in obj["frame"].items()
    }
    base = next(iter(mu.values())).base
    return GaugeParams(beta, gamma, mu, frame, base, field)


def germ_data_to_json(d: GermData):
    return {
        "field": d.field,
        "order": d.order,
        "c31": [jet_to_json(j) for j in d.c31],
        "c12": [jet_to_json(j) for j in d.c12],
        "d2": {str(k): jet_to_json(d.d2[k]) for k in (1, 2, 3)},
        "d3": {str(k): jet_to_json(d.d3[k]) for k in (1, 2, 3)},
        "a": jet_to_json(d.a),
        "u": jet_to_json(d.u),
        "xi": jet_to_json(d.xi),
    }


def germ_data_from_json(obj, field=None, order=None):
    field = field or obj.get("field", RATIONAL)
    order = order if order is not None else obj.get("order", 6)
    c31 = [jet_from_json(j, field) for j in obj["c31"]]
    c12 = [jet_from_json(j, field) for j in obj["c12"]]
    d2 = {int(k): jet_from_json(j, field) for k, j in obj["d2"].items()}
    d3 = {int(k): jet_from_json(j, field) for k, j in obj["d3"].items()}
    a = jet_from_json(obj["a"], field)
    u = jet_from_json(obj["u"], field)
    xi = jet_from_json(obj["xi"], field)
    return GermData(c31, c12, d2, d3, a, u, xi, a.base, field, order)


def constraint_data_to_json(c: ConstraintData):
    return {
        "field": c.field,
        "g0": {str(i): jet_to_json(c.g0[i]) for i in (1, 2, 3)},
        "frame": {
            str(i): {str(k): jet_to_json(c.frame[i][k]) for k in (1, 2, 3)}
            for i in (1, 2, 3)
        },
        "xi": jet_to_json(c.xi),
        "c": {
            f"{j}{k}": [jet_to_json(x) for x in trip] for (j, k), trip in c.c.items()
        },
    }


def constraint_data_from_json(obj, field=None):
    field = field or obj.get("field", RATIONAL)
    g0 = {int(i): jet_from_json(j, field) for i, j in obj["g0"].items()}
    frame = {
        int(i): {int(k): jet_from_json(j, field) for k, j in row.items()}
        for i, row in obj["frame"].items()
    }
    xi = jet_from_json(obj["xi"], field)
    c = None
    if "c" in obj:
        c = {}
        for key, trip in obj["c"].items():
            c[(int(key[0]), int(key[1]))] = [jet_from_json(x, field) for x in trip]
    return ConstraintData(g0, frame, xi, xi.base, field, c=c)
