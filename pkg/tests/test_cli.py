import json

import pytest

from cohlab import catalog, documents as D
from cohlab.cli import main


@pytest.fixture
def exported(tmp_path):
    assert main(["catalog-export", str(tmp_path / "inst")]) == 0
    return tmp_path / "inst"


def test_catalog_list(capsys):
    assert main(["catalog-list", "--kind", "spector"]) == 0
    assert capsys.readouterr().out.split() == ["spector/single-empty", "spector/evens-then-empty",
                                               "spector/three-rows"]


def test_run_verify_trace(exported, capsys):
    inst = exported / "inversion" / "A_empty_C_evens_standard.json"
    assert main(["run", "inversion", str(inst)]) == 0
    cert = exported / "inversion" / "A_empty_C_evens_standard.cert.json"
    assert json.loads(cert.read_text())["verdict"] == "valid"
    assert main(["verify", str(cert)]) == 0
    verdict = json.loads((exported / "inversion" / "A_empty_C_evens_standard.cert.verdict.json").read_text())
    assert verdict["verdict"] == "valid"
    capsys.readouterr()
    assert main(["trace", str(cert)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 25
    assert lines[0] == "stage 1: Strategy B: success, found '0', coding block '1'"


def test_budget_flags_land_in_certificate(exported, tmp_path):
    out = tmp_path / "c.json"
    inst = exported / "post" / "ge-0.json"
    assert main(["run", "post", str(inst), "--out", str(out), "--budget-steps", "60000"]) == 0
    assert json.loads(out.read_text())["budgets"]["cap"] == 60000


def test_exit_codes(exported, tmp_path):
    inst = exported / "triangle" / "staged-0.json"
    assert main(["run", "cohesive", str(inst)]) == 1
    assert main(["run", "triangle", str(tmp_path / "missing.json")]) == 1
    assert main(["verify", str(tmp_path / "missing.cert.json")]) == 1
    assert main(["trace", str(tmp_path / "missing.cert.json")]) == 1
    assert main(["frobnicate"]) == 1
    # construction error: a search bound too small for 32 elements
    coh = exported / "cohesive" / "bits-8-0-01110000.json"
    assert main(["run", "cohesive", str(coh), "--horizon", "50"]) == 2


def test_verify_rejects_tampering(exported):
    inst = exported / "triangle" / "staged-0.json"
    assert main(["run", "triangle", str(inst)]) == 0
    cert_path = exported / "triangle" / "staged-0.cert.json"
    cert = json.loads(cert_path.read_text())
    cert_path.write_text(D.dumps(catalog.tamper(cert)))
    assert main(["verify", str(cert_path)]) == 3
    # editing the instance breaks the digest
    assert main(["run", "triangle", str(inst)]) == 0
    doc = json.loads(inst.read_text())
    doc["name"] = "edited"
    inst.write_text(D.dumps(doc))
    assert main(["verify", str(cert_path)]) == 3


def test_trace_without_transcript(exported):
    inst = exported / "post" / "ge-0.json"
    assert main(["run", "post", str(inst)]) == 0
    assert main(["trace", str(exported / "post" / "ge-0.cert.json")]) == 1


def test_pipeline_directory(exported, tmp_path):
    out = tmp_path / "chain"
    assert main(["pipeline", str(exported / "pipeline" / "two-trees.json"), "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["iteration-0", "iteration-1", "iteration-2",
                                                     "summary.cert.json"]
    first = (out / "summary.cert.json").read_bytes()
    assert main(["verify", str(out / "summary.cert.json")]) == 0
    assert main(["pipeline", str(exported / "pipeline" / "two-trees.json"), "--out", str(out)]) == 0
    assert (out / "summary.cert.json").read_bytes() == first
