"""Instance and certificate documents: JSON in, objects out, and byte-stable JSON back."""
from __future__ import annotations

import hashlib
import json
from typing import Callable

import jsonschema

from . import vm
from .errors import SchemaError
from .sets import Oracle, Sigma2Descriptor, oracle_from_json
from .trees import TruncatedTree, UniformFamily, string_from_code
from .vm import Program

SCHEMA_VERSION = 1

KINDS = ("cohesive", "separator", "triangle", "superlow", "simpson-smith", "inversion",
         "post", "regularize", "spector", "pipeline")

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["schemaVersion", "kind", "name", "payload"],
    "properties": {
        "schemaVersion": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "name": {"type": "string"},
        "payload": {"type": "object"},
        "budgets": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "negative": {"type": "boolean"},
    },
}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["schemaVersion", "kind", "instance", "payload", "verdict"],
    "properties": {
        "schemaVersion": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "instance": {"type": "object", "required": ["path", "digest"]},
        "payload": {"type": "object"},
        "verdict": {"enum": ["valid", "invalid"]},
        "reason": {"type": "string"},
    },
}


def dumps(doc) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(doc) -> str:
    return hashlib.sha256(json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def validate(doc, schema=INSTANCE_SCHEMA) -> dict:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message) from None
    return doc


def load(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON: {exc}") from None


# --------------------------------------------------------------------------
# payload pieces


def program(text: str, arity: int | None = None) -> Program:
    p = vm.parse_program(text)
    if arity is not None and p.arity != arity:
        raise SchemaError(f"expected a program of arity {arity}, got {p.arity}")
    return p


def family_from_doc(doc: dict) -> UniformFamily:
    kind = doc["kind"]
    if kind == "bits":
        return UniformFamily(lambda k, x: (x >> k) & 1, doc["count"], "bits")
    if kind == "mod":
        mods, res = doc["moduli"], doc["residues"]
        return UniformFamily(lambda k, x: x % mods[k] == res[k], len(mods), "mod")
    if kind == "program":
        return UniformFamily(doc["member"], doc["count"], doc.get("name", "program"))
    raise SchemaError(f"unknown family kind {kind!r}")


def tree_from_doc(doc: dict) -> TruncatedTree:
    if "avoid" in doc:
        bad = list(doc["avoid"])
        return TruncatedTree(lambda s: not any(b in s for b in bad), doc["depth"],
                             name=doc.get("name", ""))
    if doc.get("full"):
        return TruncatedTree(lambda s: True, doc["depth"], name="full")
    return TruncatedTree.from_json(doc)


def enumeration_from_doc(texts) -> Callable[[int], Program]:
    """Listed programs first, then the standard numbering."""
    listed = [vm.parse_program(t) for t in (texts or [])]

    def enum(e):
        return listed[e] if e < len(listed) else vm.decode(e)
    return enum


def oracle(doc) -> Oracle:
    return oracle_from_json(doc)


def descriptor(doc: dict) -> Sigma2Descriptor:
    return Sigma2Descriptor.from_json(doc)


def strings(codes) -> list[str]:
    return [string_from_code(c) for c in codes]

