"""Command-line front end.

    cohlab run KIND INSTANCE [--out CERT] [budget flags]
    cohlab verify CERT
    cohlab pipeline INSTANCE [--out DIR]
    cohlab trace CERT
    cohlab catalog-list [--kind KIND]
    cohlab catalog-export DIR

Exit codes: 0 success / valid, 1 usage error or missing file, 2 construction
error, 3 invalid certificate.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import catalog, runner
from . import documents as D
from .errors import CohlabError, SchemaError

EXIT_OK, EXIT_USAGE, EXIT_CONSTRUCTION, EXIT_INVALID = 0, 1, 2, 3


def _write(path, doc):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(D.dumps(doc))


def _overrides(args) -> dict:
    return {"cap": args.budget_steps, "depth": args.depth, "search_bound": args.horizon,
            "witness_bound": args.witness_bound, "stages": args.stages}


def _load_instance(path):
    doc = D.load(path)
    return D.validate(doc)


def _default_cert_path(instance_path):
    base = instance_path[:-5] if instance_path.endswith(".json") else instance_path
    return base + ".cert.json"


def cmd_run(args) -> int:
    try:
        doc = _load_instance(args.instance)
    except (OSError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if doc["kind"] != args.kind:
        print(f"error: instance is a {doc['kind']} instance, not {args.kind}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or _default_cert_path(args.instance)
    rel = os.path.relpath(os.path.abspath(args.instance), os.path.dirname(os.path.abspath(out)))
    try:
        cert = runner.certificate(doc, rel, _overrides(args))
    except CohlabError as exc:
        print(f"construction error ({exc.reason}): {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    _write(out, cert)
    print(f"{out}: {cert['verdict']}" + (f" ({cert['reason']})" if "reason" in cert else ""))
    return EXIT_OK


def verify_certificate(cert_path) -> tuple[int, dict]:
    """Re-check a certificate file; returns (exit code, verdict document)."""
    try:
        cert = D.validate(D.load(cert_path), D.CERTIFICATE_SCHEMA)
        inst_path = os.path.join(os.path.dirname(os.path.abspath(cert_path)), cert["instance"]["path"])
        doc = _load_instance(inst_path)
    except (OSError, SchemaError) as exc:
        return EXIT_USAGE, {"verdict": "error", "reason": str(exc)}
    if D.digest(doc) != cert["instance"]["digest"]:
        return EXIT_INVALID, {"verdict": "invalid", "reason": "instance digest mismatch"}
    if doc["kind"] != cert["kind"]:
        return EXIT_INVALID, {"verdict": "invalid", "reason": "kind mismatch"}
    try:
        result = runner.check(doc, cert["payload"], runner.budgets_for(doc, cert.get("budgets")))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        return EXIT_INVALID, {"verdict": "invalid", "reason": f"malformed payload: {exc!r}"}
    verdict = {"certificate": os.path.basename(cert_path), "kind": cert["kind"],
               "verdict": result.verdict}
    if result.reason is not None:
        verdict["reason"] = result.reason
    elif cert["verdict"] != "valid":
        verdict = {**verdict, "verdict": "invalid", "reason": "certificate records an invalid verdict"}
    return (EXIT_OK if verdict["verdict"] == "valid" else EXIT_INVALID), verdict


def cmd_verify(args) -> int:
    code, verdict = verify_certificate(args.certificate)
    if code == EXIT_USAGE:
        print(f"error: {verdict['reason']}", file=sys.stderr)
        return code
    base = args.certificate[:-5] if args.certificate.endswith(".json") else args.certificate
    _write(base + ".verdict.json", verdict)
    print(verdict["verdict"] + (f": {verdict['reason']}" if "reason" in verdict else ""))
    return code


def cmd_pipeline(args) -> int:
    try:
        doc = _load_instance(args.instance)
    except (OSError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if doc["kind"] != "pipeline":
        print("error: not a pipeline instance", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or _default_cert_path(args.instance)[: -len(".cert.json")] + ".chain"
    rel = os.path.relpath(os.path.abspath(args.instance), os.path.abspath(out))
    cert = runner.certificate(doc, rel, _overrides(args))
    for link in cert["payload"]["chain"]:
        d = os.path.join(out, f"iteration-{link['iteration']}")
        _write(os.path.join(d, "oracle.json"), link["top"])
        if link["iteration"]:
            _write(os.path.join(d, "path.json"), link["path"])
            _write(os.path.join(d, "inversion.json"), link["inversion"])
    _write(os.path.join(out, "summary.cert.json"), cert)
    n = len(cert["payload"]["chain"])
    print(f"{out}: chain of length {n}, {cert['verdict']}")
    if "error" in cert["payload"]:
        print(f"aborted at iteration {cert['payload']['error']['iteration']}: "
              f"{cert['payload']['error']['message']}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    return EXIT_OK


def trace_lines(cert: dict) -> list[str]:
    kind, p = cert["kind"], cert["payload"]
    if kind == "inversion":
        out = []
        for st in p["stages"]:
            if st["strategy"] == "B":
                what = (f"success, found {st['found']!r}, coding block {st['block']!r}" if st["success"]
                        else "no extension" + (" (width cap bound)" if st["width_cap_bound"] else ""))
                out.append(f"stage {st['stage']}: Strategy B: {what}")
            else:
                out.append(f"stage {st['stage']}: Strategy (A+B)': tau = {st['tau']!r}")
        return out
    if kind in ("superlow", "simpson-smith"):
        return [f"formula {d['e']} (input {d['x']}): divergence class "
                f"{'kept' if d['kept_divergence'] else 'dropped'}, leftmost step to {d['branch']!r}"
                for d in p["decisions"]]
    if kind == "cohesive":
        return [f"stage {r['stage']}: least s = {r['element']} with R_k(s) = "
                + "".join(str(b) for _, b in r["constraints"]) for r in p["log"]]
    if kind == "pipeline":
        return [f"iteration {link['iteration']}: path {link['path']['path_prefix']!r}, "
                f"B-prefix of length {len(link['inversion']['b_prefix'])}" for link in p["chain"][1:]]
    raise ValueError(f"{kind} certificates carry no transcript")


def cmd_trace(args) -> int:
    try:
        cert = D.load(args.certificate)
        lines = trace_lines(cert)
    except (OSError, SchemaError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_catalog_list(args) -> int:
    for doc in catalog.all_instances():
        if args.kind is None or doc["kind"] == args.kind:
            print(f"{doc['kind']}/{doc['name']}")
    return EXIT_OK


def cmd_catalog_export(args) -> int:
    for doc in catalog.all_instances():
        fname = "".join(c if c.isalnum() or c in "-_" else "_" for c in doc["name"]) + ".json"
        _write(os.path.join(args.directory, doc["kind"], fname), doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cohlab", description="Effective constructions and their checkers.")
    sub = ap.add_subparsers(dest="command", required=True)

    def budget_flags(p):
        p.add_argument("--out")
        p.add_argument("--budget-steps", type=int, help="step cap for halting questions")
        p.add_argument("--depth", type=int, help="truncation depth for pattern trees")
        p.add_argument("--horizon", type=int, help="search bound for cohesive sets")
        p.add_argument("--witness-bound", type=int)
        p.add_argument("--stages", type=int)

    p = sub.add_parser("run", help="run a construction and write its certificate")
    p.add_argument("kind", choices=D.KINDS)
    p.add_argument("instance")
    budget_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="re-check a certificate against its instance")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pipeline", help="run a pipeline instance into a chain directory")
    p.add_argument("instance")
    budget_flags(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("trace", help="print the stages recorded in a certificate")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("catalog-list", help="list bundled instances")
    p.add_argument("--kind", choices=D.KINDS)
    p.set_defaults(func=cmd_catalog_list)

    p = sub.add_parser("catalog-export", help="write bundled instances as JSON files")
    p.add_argument("directory")
    p.set_defaults(func=cmd_catalog_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
