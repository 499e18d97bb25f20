"""The eight acceptance criteria, run at the budgets pinned in the catalog.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""
import copy
import json
import time

import pytest

from cohlab import catalog, documents as D, runner, verify
from cohlab.constructions.cohesive import cohesive_from_path, path_approximation, sigma2_from_tree
from cohlab.pairing import pair
from cohlab.sets import ApproxSet
from cohlab.trees import all_strings, string_code

RESULTS: dict[int, str] = {}

TITLES = {
    1: "cohesiveness suite",
    2: "triangle round-trip",
    3: "superlow audit",
    4: "Friedberg inversion",
    5: "Post reduction",
    6: "coding lemmas",
    7: "pipeline demo",
    8: "negative controls",
}


def _of_kind(kind):
    return [d for d in catalog.all_instances() if d["kind"] == kind]


def _record(n, target, body):
    t0 = time.perf_counter()
    try:
        detail = body()
        ok, why = True, detail
    except AssertionError as exc:
        ok, why = False, str(exc) or "assertion failed"
    dt = time.perf_counter() - t0
    if ok and target is not None and dt >= target:
        ok, why = False, f"{why}; took {dt:.1f}s, target {target}s"
    RESULTS[n] = f"criterion {n} ({TITLES[n]}): {'PASS' if ok else 'FAIL'} [{dt:.2f}s] {why}"
    assert ok, RESULTS[n]


def _cohesive():
    docs = []
    for doc in _of_kind("cohesive"):
        b = runner.budgets_for(doc)
        fam = D.family_from_doc(doc["payload"]["family"])
        if doc["payload"]["count"] >= 32 and fam.count <= 8 and b["search_bound"] <= 10_000:
            docs.append(doc)
    assert len(docs) >= 20, f"only {len(docs)} eligible instances"
    for doc in docs:
        b = runner.budgets_for(doc)
        fam = D.family_from_doc(doc["payload"]["family"])
        payload, _ = runner.construct(doc)
        f = path_approximation(payload["path"])
        elements = payload["elements"]
        assert len(elements) >= 32, doc["name"]
        cert = verify.check_cohesive(elements, fam, horizon=b["search_bound"])
        assert cert.valid, f"{doc['name']}: {cert.reason}"
        # thresholds are exact: the tail past each has one side, the element before it the other
        for k, (first, side, tail) in enumerate(verify.cohesive_thresholds(elements, fam)):
            i = len(elements) - tail
            assert elements[i] == first and all(fam(k, x) == side for x in elements[i:]), doc["name"]
            assert i == 0 or fam(k, elements[i - 1]) != side, doc["name"]
        least = verify.check_least_s(elements, fam, f)
        assert least.valid, f"{doc['name']}: {least.reason}"
        again = cohesive_from_path(fam, f, len(elements), b["search_bound"])
        assert list(again.elements) == elements
    return f"{len(docs)} instances, 32 elements each"


def _triangle():
    docs = []
    for doc in _of_kind("triangle"):
        t = D.tree_from_doc(doc["payload"]["tree"])
        if t.depth == 6 and t.num_stages <= 64 and doc["name"].startswith("staged"):
            docs.append((doc, t))
    assert len(docs) >= 10, f"only {len(docs)} staged trees"
    for doc, t in docs:
        cert = verify.roundtrip_triangle(t)
        assert cert.valid, f"{doc['name']}: {cert.reason}"
        a0, a1 = sigma2_from_tree(t)
        for sigma in all_strings(t.depth):
            x = string_code(sigma)
            assert not (a0.holds(x) and a1.holds(x)), f"{doc['name']}: {sigma!r} in both"
    return f"{len(docs)} staged trees at depth 6"


def _superlow():
    docs = _of_kind("superlow")
    total = 0
    for doc in docs:
        p = doc["payload"]
        t = D.tree_from_doc(p["tree"])
        n = len(p["formulas"])
        assert n <= 6 and t.depth <= 12, doc["name"]
        payload, _ = runner.construct(doc)
        prefix = payload["path_prefix"]
        assert all(t.contains(prefix[:i]) for i in range(len(prefix) + 1)), doc["name"]
        assert payload["table_queries"] <= 2 ** n, doc["name"]
        cert = verify.check_superlow(payload, t, [D.program(x) for x in p["formulas"]],
                                     p.get("halt_catalog"))
        assert cert.valid, f"{doc['name']}: {cert.reason}"
        total += payload["table_queries"]
    return f"{len(docs)} forcing instances, {total} table queries"


def _inversion():
    docs = [d for d in _of_kind("inversion") if d["payload"].get("code_range", 16) == 16]
    assert len(docs) >= 10, f"only {len(docs)} pairs"
    claims = 0
    for doc in docs:
        payload, _ = runner.construct(doc)
        c = D.oracle(doc["payload"]["c"])
        done = [st for st in payload["stages"] if st["strategy"] == "B" and st["success"]]
        assert done, doc["name"]
        decoded = [int(b) for b in done[-1]["block"]][:16]
        assert decoded == c.prefix(16), f"{doc['name']}: decoded {decoded}"
        cert = runner.check(doc, payload, runner.budgets_for(doc))
        assert cert.valid, f"{doc['name']}: {cert.reason}"
        claims += sum(len(st["witnesses"]) for st in payload["stages"])
    return f"{len(docs)} pairs, {claims} convergence claims replayed"


def _post():
    docs = []
    for doc in _of_kind("post"):
        phi = D.descriptor(doc["payload"]["descriptor"])
        if phi.x_range <= 16 and max(phi.y1_range, phi.y2_range) <= 32:
            docs.append((doc, phi))
    assert len(docs) >= 15, f"only {len(docs)} descriptors"
    for doc, phi in docs:
        payload, _ = runner.construct(doc)
        a = D.oracle(doc["payload"].get("oracle", {"kind": "table", "default": 0, "entries": []}))
        brute = [int(phi.holds(x, a)) for x in range(phi.x_range)]
        assert payload["values"] == brute, doc["name"]
    return f"{len(docs)} descriptors"


def _coding():
    regs = _of_kind("regularize")
    assert len(regs) >= 20
    for doc in regs:
        payload, _ = runner.construct(doc)
        c = D.oracle(doc["payload"]["c"])
        decoded = verify.decode_regular(payload["codes"])
        assert decoded == {a: c(a) for a, _ in doc["payload"]["anchors"]}, doc["name"]
    specs = [d for d in _of_kind("spector") if len(d["payload"]["sets"]) <= 3]
    assert specs
    for doc in specs:
        payload, b = runner.construct(doc)
        sets = [D.oracle(x) for x in doc["payload"]["sets"]]
        assert payload["width"] == 64
        for n, y in enumerate(payload["q"]):
            t = payload["thresholds"][str(y)]
            row = [int(pair(x, y) in set(payload["ones"])) for x in range(64)]
            assert row[t:] == sets[n].prefix(64)[t:], f"{doc['name']}: row {y}"
        cert = runner.check(doc, payload, b)
        assert cert.valid, f"{doc['name']}: {cert.reason}"
    return f"{len(regs)} tables decoded, {len(specs)} Spector codings"


def _pipeline():
    doc = catalog.by_name("pipeline", "two-trees")
    assert len(doc["payload"]["trees"]) == 2
    assert not any(D.oracle(doc["payload"]["a"]).prefix(256)), "A is not empty"
    first = D.dumps(runner.certificate(doc, "two-trees.json"))
    second = D.dumps(runner.certificate(doc, "two-trees.json"))
    assert first == second, "rerun differs"
    cert = json.loads(first)
    assert cert["verdict"] == "valid", cert.get("reason")
    assert len(cert["payload"]["chain"]) == 3
    again = verify.check_pipeline(cert["payload"], cert["budgets"]["cap"])
    assert again.valid, again.reason
    return "2 iterations over the empty set, byte-identical rerun"


def _negative():
    reasons = {}
    for doc in catalog.negative_instances():
        cert = runner.certificate(doc, "x.json")
        assert cert["verdict"] == "valid", f"{doc['kind']}: untampered certificate rejected"
        bad = catalog.tamper(copy.deepcopy(cert))
        res = runner.check(doc, bad["payload"], bad["budgets"])
        assert res.verdict == "invalid", f"{doc['kind']}: tampering accepted"
        assert isinstance(res.reason, str) and res.reason
        reasons[doc["kind"]] = res.reason
    assert set(reasons) == set(D.KINDS), f"missing kinds {set(D.KINDS) - set(reasons)}"
    t = D.tree_from_doc(catalog.by_name("triangle", "staged-0")["payload"]["tree"])
    res = verify.roundtrip_triangle(t, tamper=lambda d: ApproxSet(lambda x, s: 0, lambda x: 0))
    assert not res.valid and res.reason
    return f"{len(reasons) + 1} tampered certificates rejected with reasons"


CRITERIA = [(1, 10, _cohesive), (2, 30, _triangle), (3, 20, _superlow), (4, 30, _inversion),
            (5, 10, _post), (6, 30, _coding), (7, 60, _pipeline), (8, None, _negative)]


@pytest.mark.parametrize("n,target,body", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(n, target, body):
    _record(n, target, body)


if __name__ == "__main__":
    for n, target, body in CRITERIA:
        try:
            _record(n, target, body)
        except AssertionError:
            pass
        print(RESULTS[n])
