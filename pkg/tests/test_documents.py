import json

import pytest

from cohlab import catalog, documents as D
from cohlab.errors import SchemaError


def test_catalog_validates(instances):
    names = [(d["kind"], d["name"]) for d in instances]
    assert len(names) == len(set(names))
    for doc in instances:
        D.validate(doc)


def test_dumps_canonical():
    assert D.dumps({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'
    assert D.digest({"b": 1, "a": 2}) == D.digest({"a": 2, "b": 1})


def test_validate_rejects():
    with pytest.raises(SchemaError):
        D.validate({"schemaVersion": 1, "kind": "nope", "name": "x", "payload": {}})
    with pytest.raises(SchemaError):
        D.validate({"schemaVersion": 1, "kind": "post", "name": "x", "payload": {},
                    "budgets": {"cap": -1}})


def test_load_malformed(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        D.load(p)


def test_enumeration_lists_first():
    enum = D.enumeration_from_doc([catalog.F_TRUE])
    assert enum(0) == D.program(catalog.F_TRUE)
    from cohlab import vm
    assert enum(5) == vm.decode(5)


def test_strings():
    assert D.strings([1, 2, 3, 6]) == ["", "0", "1", "10"]
