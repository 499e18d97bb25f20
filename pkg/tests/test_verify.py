import copy

import pytest

from cohlab import catalog, runner
from cohlab.documents import tree_from_doc
from cohlab.pairing import triple
from cohlab.sets import ApproxSet, TableOracle
from cohlab.verify import check_path, check_regular, roundtrip_triangle

FULL3 = tree_from_doc({"full": True, "depth": 3})


def test_check_path_chain():
    assert check_path(["", "0", "01", "011"], FULL3).valid
    bad = check_path(["", "0", "11", "110"], FULL3)
    assert not bad.valid and bad.reason == "'11' does not extend '0'"
    assert check_path(["", "1"], FULL3).reason == "length 2: 0 strings"


def test_check_path_from_approximation():
    t = tree_from_doc({"avoid": ["1"], "depth": 3})
    zeros = ApproxSet(lambda code, s: code in (1, 2, 4, 8), lambda code: 0)
    assert check_path(zeros, t).valid
    ones = ApproxSet(lambda code, s: code in (1, 3, 7, 15), lambda code: 0)
    assert check_path(ones, t).reason == "'1' not in tree"


def test_check_regular_rejects_flip():
    payload = {"anchors": [[0, 1], [1, 1]], "triples": [[0, 1, 0], [1, 1, 1]], "codes": []}
    payload["codes"] = [triple(*t) for t in payload["triples"]]
    c = TableOracle({1: 1})
    assert check_regular(payload, c).valid
    payload["triples"][1][2] = 0
    assert check_regular(payload, c).reason == "codes do not match triples"


def test_roundtrip_rejects_tampered_separator():
    t = tree_from_doc(catalog.by_name("triangle", "staged-1")["payload"]["tree"])
    assert roundtrip_triangle(t).valid
    cert = roundtrip_triangle(t, tamper=lambda d: ApproxSet(lambda x, s: 0, lambda x: 0))
    assert not cert.valid and cert.reason


@pytest.mark.parametrize("doc", catalog.negative_instances(), ids=lambda d: d["kind"])
def test_negative_controls(doc):
    cert = runner.certificate(doc, "x.json")
    assert cert["verdict"] == "valid"
    bad = catalog.tamper(copy.deepcopy(cert))
    result = runner.check(doc, bad["payload"], bad["budgets"])
    assert result.verdict == "invalid"
    assert isinstance(result.reason, str) and result.reason
    assert result.to_json()["reason"] == result.reason
