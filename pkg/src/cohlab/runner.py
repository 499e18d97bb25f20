"""Run an instance document through its construction, and check a payload against its instance.

``construct(doc, budgets)`` returns a JSON payload; ``check(doc, payload, budgets)``
returns a Certificate and touches only the checkers.
"""
from __future__ import annotations

from . import documents as D
from . import vm
from . import verify
from .constructions.coding import regularize, spector_code
from .constructions.cohesive import (cohesive_from_path, path_approximation,
                                     run_triangle, separation_approximation,
                                     separation_family, separator_from_cohesive)
from .constructions.forcing import simpson_smith_path, superlow_basis
from .constructions.inversion import friedberg_invert
from .constructions.pipeline import ideal_pipeline
from .sets import ApproxSet, EMPTY, JumpOracle, post_reduce
from .trees import tree_from_family

DEFAULT_BUDGETS = {"cap": 2_000, "search_bound": 10_000, "witness_bound": 0, "stages": 25,
                   "width_cap": 16384, "branch_cap": 12, "extra_elements": 16, "depth": 0}


def budgets_for(doc: dict, overrides: dict | None = None) -> dict:
    b = dict(DEFAULT_BUDGETS)
    b.update(doc.get("budgets", {}))
    b.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return b


def _tree(doc, budgets):
    tdoc = dict(doc)
    if budgets.get("depth") and ("avoid" in tdoc or tdoc.get("full")):
        tdoc["depth"] = budgets["depth"]
    return D.tree_from_doc(tdoc)


def _fixed(bits):
    return ApproxSet(lambda x, s: int(bits[x]), lambda x: 0, "table")


# -- cohesive


def _cohesive_run(doc, b):
    p = doc["payload"]
    fam = D.family_from_doc(p["family"])
    path = p.get("path")
    if path is None:
        path = tree_from_family(fam, b["witness_bound"] or b["search_bound"]).leftmost_path()
    out = cohesive_from_path(fam, path_approximation(path), p["count"], b["search_bound"])
    return {"path": path, **out.to_json()}


def _cohesive_check(doc, payload, b):
    p = doc["payload"]
    fam = D.family_from_doc(p["family"])
    elements = payload["elements"]
    if len(elements) != p["count"]:
        return verify.Certificate("cohesive", {}, "invalid", f"{len(elements)} elements, wanted {p['count']}")
    cert = verify.check_cohesive(elements, fam, horizon=b["search_bound"])
    if not cert.valid:
        return cert
    path = payload["path"]
    least = verify.check_least_s(elements, fam, _fixed([int(c) for c in path]))
    return cert if least.valid else least


# -- separator


def _separator_run(doc, b):
    p = doc["payload"]
    a0, a1 = D.descriptor(p["a0"]), D.descriptor(p["a1"])
    f = separation_approximation(a0, a1)
    count = a0.x_range
    fam = separation_family(f, count)
    wb = b["witness_bound"] or f.settle + 4 * (count + 2)
    path = tree_from_family(fam, wb).leftmost_path()
    n = count + b["extra_elements"]
    out = cohesive_from_path(fam, path_approximation(path), n, wb + 4 * n)
    d = separator_from_cohesive(f, out, count, min_tail=b["extra_elements"])
    return {"family_path": path, "elements": list(out.elements),
            "separator": [d.limit(x, out.elements[-1]) for x in range(count)]}


def _separator_check(doc, payload, b):
    p = doc["payload"]
    a0, a1 = D.descriptor(p["a0"]), D.descriptor(p["a1"])
    bits = payload["separator"]
    if len(bits) != a0.x_range:
        return verify.Certificate("separator", {}, "invalid", "separator table has the wrong length")
    return verify.check_separator(_fixed(bits), a0, a1, a0.x_range, 0)


# -- triangle


def _triangle_run(doc, b):
    t = _tree(doc["payload"]["tree"], b)
    run = run_triangle(t, witness_bound=b["witness_bound"] or None,
                       extra_elements=b["extra_elements"])
    return {"chain": run.path.chain, "cohesive": list(run.cohesive.elements),
            "family_path": run.family_path}


def _triangle_check(doc, payload, b):
    t = _tree(doc["payload"]["tree"], b)
    left, right = verify.tree_growth_sets(t)
    if left & right:
        return verify.Certificate("path", {}, "invalid", "growth sets overlap")
    return verify.check_path(payload["chain"], t)


# -- forcing


def _superlow_run(doc, b):
    p = doc["payload"]
    t = _tree(p["tree"], b)
    return superlow_basis(t, [D.program(x) for x in p["formulas"]], b["cap"]).to_json()


def _superlow_check(doc, payload, b):
    p = doc["payload"]
    t = _tree(p["tree"], b)
    return verify.check_superlow(payload, t, [D.program(x) for x in p["formulas"]],
                                 p.get("halt_catalog"))


def _ss_formulas(p):
    return [(D.program(text), x) for text, x in p["formulas"]]


def _ss_run(doc, b):
    p = doc["payload"]
    return simpson_smith_path(_tree(p["tree"], b), _ss_formulas(p), b["cap"]).to_json()


def _ss_check(doc, payload, b):
    p = doc["payload"]
    return verify.check_simpson_smith(payload, _tree(p["tree"], b), _ss_formulas(p))


# -- inversion


def _inversion_run(doc, b):
    p = doc["payload"]
    a, c = D.oracle(p.get("a", EMPTY.to_json())), D.oracle(p["c"])
    tr = friedberg_invert(a, c, b["stages"], JumpOracle(a, b["cap"]),
                          enumeration=D.enumeration_from_doc(p.get("programs")),
                          width_cap=b["width_cap"], branch_cap=b["branch_cap"])
    return tr.to_json()


def _inversion_check(doc, payload, b):
    p = doc["payload"]
    a, c = D.oracle(p.get("a", EMPTY.to_json())), D.oracle(p["c"])
    return verify.check_inversion(payload, a, c, p.get("code_range", 16),
                                  D.enumeration_from_doc(p.get("programs")))


# -- post


def _post_run(doc, b):
    p = doc["payload"]
    phi = D.descriptor(p["descriptor"])
    a = D.oracle(p.get("oracle", EMPTY.to_json()))
    red = post_reduce(phi)
    jump = JumpOracle(a, b["cap"])
    return {"values": [int(red.evaluate(x, jump)) for x in range(phi.x_range)],
            "searcher": vm.pretty_print(red.searcher)}


def _post_check(doc, payload, b):
    p = doc["payload"]
    phi = D.descriptor(p["descriptor"])
    a = D.oracle(p.get("oracle", EMPTY.to_json()))
    values = payload["values"]
    if len(values) != phi.x_range:
        return verify.Certificate("separator", {}, "invalid", "values have the wrong length")
    for x in range(phi.x_range):
        if int(phi.holds(x, a)) != values[x]:
            return verify.Certificate("separator", {}, "invalid", f"x={x}: reduced value {values[x]} disagrees")
    return verify.Certificate("separator", {"checked": phi.x_range})


# -- coding


def _regular_run(doc, b):
    p = doc["payload"]
    return regularize(D.oracle(p["c"]), p["anchors"]).to_json()


def _regular_check(doc, payload, b):
    p = doc["payload"]
    if [list(x) for x in p["anchors"]] != payload["anchors"]:
        return verify.Certificate("regular", {}, "invalid", "anchors differ from the instance")
    return verify.check_regular(payload, D.oracle(p["c"]))


def _spector_run(doc, b):
    p = doc["payload"]
    res = spector_code([D.oracle(x) for x in p["sets"]], p["q"], width=p.get("width", 64),
                       ext_size=p.get("ext_size", 2), pool_size=p.get("pool_size", 12),
                       cap=b["cap"], enumeration=D.enumeration_from_doc(p.get("programs")))
    return res.to_json()


def _spector_check(doc, payload, b):
    p = doc["payload"]
    if payload["q"] != p["q"][:len(p["sets"])] or payload["width"] != p.get("width", 64):
        return verify.Certificate("spector", {}, "invalid", "rows or width differ from the instance")
    return verify.check_spector(payload, [D.oracle(x) for x in p["sets"]], p.get("ext_size", 2),
                                b["cap"], D.enumeration_from_doc(p.get("programs")))


# -- pipeline


def _pipeline_run(doc, b):
    p = doc["payload"]
    trees = [D.tree_from_doc(t) for t in p.get("trees", [])]
    forms = [[(D.program(t), x) for t, x in fs] for fs in p.get("formulas", [])]
    res = ideal_pipeline(D.oracle(p.get("a", EMPTY.to_json())), trees, formulas=forms,
                         stages=b["stages"], cap=b["cap"])
    return res.to_json()


def _pipeline_check(doc, payload, b):
    p = doc["payload"]
    if "error" in payload:
        return verify.Certificate("pipeline", {}, "invalid", f"aborted: {payload['error']['reason']}")
    if len(payload["chain"]) != len(p.get("trees", [])) + 1:
        return verify.Certificate("pipeline", {}, "invalid", "chain length")
    if payload["chain"][0]["top"] != p.get("a", EMPTY.to_json()):
        return verify.Certificate("pipeline", {}, "invalid", "chain does not start at A")
    for link, t in zip(payload["chain"][1:], p.get("trees", [])):
        if link["tree"] != D.tree_from_doc(t).to_json():
            return verify.Certificate("pipeline", {}, "invalid", "tree differs from the instance")
    return verify.check_pipeline(payload, b["cap"])


HANDLERS = {
    "cohesive": (_cohesive_run, _cohesive_check),
    "separator": (_separator_run, _separator_check),
    "triangle": (_triangle_run, _triangle_check),
    "superlow": (_superlow_run, _superlow_check),
    "simpson-smith": (_ss_run, _ss_check),
    "inversion": (_inversion_run, _inversion_check),
    "post": (_post_run, _post_check),
    "regularize": (_regular_run, _regular_check),
    "spector": (_spector_run, _spector_check),
    "pipeline": (_pipeline_run, _pipeline_check),
}


def construct(doc: dict, overrides: dict | None = None) -> tuple[dict, dict]:
    b = budgets_for(doc, overrides)
    return HANDLERS[doc["kind"]][0](doc, b), b


def check(doc: dict, payload: dict, budgets: dict) -> verify.Certificate:
    return HANDLERS[doc["kind"]][1](doc, payload, budgets)


def certificate(doc: dict, instance_path: str, overrides: dict | None = None) -> dict:
    payload, b = construct(doc, overrides)
    cert = check(doc, payload, b)
    out = {"schemaVersion": D.SCHEMA_VERSION, "kind": doc["kind"],
           "instance": {"path": instance_path, "name": doc["name"], "digest": D.digest(doc)},
           "budgets": b, "payload": payload, "verdict": cert.verdict}
    if cert.reason is not None:
        out["reason"] = cert.reason
    return out
