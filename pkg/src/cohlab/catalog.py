"""Bundled instances, built deterministically, plus tamperings used as negative controls."""
from __future__ import annotations

import copy
import random

from .documents import SCHEMA_VERSION
from .pairing import pair
from .sets import JoinOracle, TableOracle
from .trees import string_code, strings_of_length

# --------------------------------------------------------------------------
# programs

GE_Y1_X = """ARITY 3
# accept iff y1 + {k} >= x
{inc}top: JZ r0, yes
JZ r1, no
DEC r0
DEC r1
JMP top
yes: HALT 1
no: HALT 0
"""

EQ_2Y1_X = """ARITY 3
# accept iff x == 2*y1 + {k}
{dec}top: JZ r1, end
DEC r1
JZ r0, no
DEC r0
JZ r0, no
DEC r0
JMP top
end: JZ r0, yes
no: HALT 0
yes: HALT 1
"""

NE_Y2_X = """ARITY 3
# accept iff y2 + {k} != x
{inc}top: JZ r0, z
JZ r2, yes
DEC r0
DEC r2
JMP top
z: JZ r2, no
yes: HALT 1
no: HALT 0
"""

ORACLE_ABOVE = """ARITY 3
# accept iff y1 >= x and y1 is in the oracle
QUERY r1
JZ flag, no
top: JZ r0, yes
JZ r1, no
DEC r0
DEC r1
JMP top
yes: HALT 1
no: HALT 0
"""

ORACLE_QUIET = """ARITY 3
# accept iff y1 >= x and (y2 < y1 or y2 not in the oracle)
QUERY r2
JZ flag, ge
r3cp: JZ r2, ge
JZ r1, no
DEC r2
DEC r1
JMP r3cp
ge: JZ r0, yes
JZ r1, no
DEC r0
DEC r1
JMP ge
yes: HALT 1
no: HALT 0
"""


def _rep(op, reg, k):
    return "".join(f"{op} {reg}\n" for _ in range(k))


def _ge(k):
    return GE_Y1_X.format(k=k, inc=_rep("INC", "r1", k))


def _eq2(k):
    return EQ_2Y1_X.format(k=k, dec="".join("JZ r0, no\nDEC r0\n" for _ in range(k)))


def _ne(k):
    return NE_Y2_X.format(k=k, inc=_rep("INC", "r2", k))


# formulas take e in r0 and read their oracle string
F_BIT_E = "ARITY 1\n# halt iff bit e is 1\nQUERY r0\nJZ flag, loop\nHALT 1\nloop: JMP loop\n"
F_BIT_E_ZERO = "ARITY 1\n# halt iff bit e is 0\nQUERY r0\nJZ flag, yes\nloop: JMP loop\nyes: HALT 0\n"
F_BIT0 = "ARITY 1\n# halt iff bit 0 is 1\nQUERY r1\nJZ flag, loop\nHALT 1\nloop: JMP loop\n"
F_TRUE = "ARITY 1\nHALT 0\n"
F_FALSE = "ARITY 1\nloop: JMP loop\n"
F_PAIR = """ARITY 1
# halt iff bits e and e+1 are both 1
QUERY r0
JZ flag, loop
INC r0
QUERY r0
JZ flag, loop
HALT 1
loop: JMP loop
"""
F_SCAN = """ARITY 1
# halt iff some bit at or below e is 1
top: QUERY r0
JZ flag, next
HALT 1
next: JZ r0, loop
DEC r0
JMP top
loop: JMP loop
"""

# inversion programs read A+B: even positions are A, odd ones B
P_B_AT_E = """ARITY 1
# halt iff e is in B
top: JZ r0, ask
DEC r0
INC r1
INC r1
JMP top
ask: INC r1
QUERY r1
JZ flag, loop
HALT 1
loop: JMP loop
"""
P_A_AT_E = """ARITY 1
# halt iff e is in A
top: JZ r0, ask
DEC r0
INC r1
INC r1
JMP top
ask: QUERY r1
JZ flag, loop
HALT 1
loop: JMP loop
"""
P_B_AHEAD = """ARITY 1
# halt iff e+3 is in B
INC r0
INC r0
INC r0
top: JZ r0, ask
DEC r0
INC r1
INC r1
JMP top
ask: INC r1
QUERY r1
JZ flag, loop
HALT 1
loop: JMP loop
"""
P_B_SCAN = """ARITY 1
# halt once some element of B at or above e turns up
top: JZ r0, scan
DEC r0
INC r1
INC r1
JMP top
scan: INC r1
QUERY r1
JZ flag, more
HALT 1
more: INC r1
JMP scan
"""
INVERSION_PROGRAMS = [P_B_AT_E, F_TRUE, F_FALSE, P_A_AT_E, P_B_AHEAD, P_B_SCAN]


def _member_prog(positions, need_all=True):
    """Halt iff all (or any) of ``positions`` are in the oracle."""
    lines = ["ARITY 1"]
    n = len(positions)
    for i, p in enumerate(positions):
        lines += [f"c{i}: JZ r1, s{i}", "DEC r1", f"JMP c{i}"]
        if p:
            lines += [f"s{i}: INC r1"] + ["INC r1"] * (p - 1) + ["QUERY r1"]
        else:
            lines.append(f"s{i}: QUERY r1")
        lines.append("JZ flag, loop" if need_all else f"JZ flag, c{i + 1}")
        if not need_all:
            lines.append("HALT 1")
    lines.append("HALT 1" if need_all else f"c{n}: JMP loop")
    lines.append("loop: JMP loop")
    return "\n".join(lines) + "\n"


def _doc(kind, name, payload, budgets=None):
    doc = {"schemaVersion": SCHEMA_VERSION, "kind": kind, "name": name, "payload": payload}
    if budgets:
        doc["budgets"] = budgets
    return doc


def _table(xs, default=0):
    return TableOracle(list(xs), default).to_json()


# --------------------------------------------------------------------------
# cohesive sets

R_GE_K = "ARITY 2\n# x >= k\ntop: JZ r0, yes\nJZ r1, no\nDEC r0\nDEC r1\nJMP top\nyes: HALT 1\nno: HALT 0\n"
R_BIT_K = """ARITY 2
# bit k of x
top: JZ r0, par
DEC r0
half: JZ r1, done
DEC r1
JZ r1, done
DEC r1
INC r2
JMP half
done: JZ r2, top
DEC r2
INC r1
JMP done
par: JZ r1, no
DEC r1
JZ r1, yes
DEC r1
JMP par
yes: HALT 1
no: HALT 0
"""


def cohesive_instances() -> list[dict]:
    out = []
    rng = random.Random(4101)
    for count in range(3, 9):
        for j in range(2):
            path = "".join(rng.choice("01") for _ in range(count))
            out.append(_doc("cohesive", f"bits-{count}-{j}-{path}",
                            {"family": {"kind": "bits", "count": count}, "path": path, "count": 32}))
    mods = [([2, 3], [0, 0]), ([2, 3, 5], [1, 2, 0]), ([3, 4], [1, 1]), ([2, 2, 2], [0, 1, 0]),
            ([5, 7], [0, 3]), ([2, 3, 4, 6], [0, 0, 0, 0])]
    for m, r in mods:
        out.append(_doc("cohesive", "mod-" + "-".join(f"{a}r{b}" for a, b in zip(m, r)),
                        {"family": {"kind": "mod", "moduli": m, "residues": r}, "count": 32},
                        {"witness_bound": 600}))
    out.append(_doc("cohesive", "program-ge-4",
                    {"family": {"kind": "program", "member": R_GE_K, "count": 4}, "count": 32},
                    {"witness_bound": 200, "search_bound": 400}))
    out.append(_doc("cohesive", "program-bits-3",
                    {"family": {"kind": "program", "member": R_BIT_K, "count": 3}, "path": "101",
                     "count": 32}, {"search_bound": 400}))
    return out


def trivial_cohesive() -> dict:
    return _doc("cohesive", "all-of-N", {"family": {"kind": "program", "member": "ARITY 2\nHALT 1\n",
                                                    "count": 4}, "path": "1111", "count": 4})


# --------------------------------------------------------------------------
# staged trees


def staged_tree(seed: int, depth: int = 6, garbage_stages: int = 8, flicker: int = 8) -> dict:
    """Levels revealed one per stage alongside a transient dead branch, then leaves flicker.

    The flicker keeps new nodes entering above the live part until the last
    stage, which is what makes the growth sets point at it.
    """
    rng = random.Random(seed)
    spine = "".join(rng.choice("01") for _ in range(depth))
    final = {spine[:i] for i in range(depth + 1)}
    for _ in range(rng.randint(1, 5)):
        s = rng.choice(sorted(final))
        ext = s + "".join(rng.choice("01") for _ in range(rng.randint(0, depth - len(s))))
        final |= {ext[:i] for i in range(len(ext) + 1)}
    g = "".join(rng.choice("01") for _ in range(depth))
    garbage = {g[:i] for i in range(depth + 1)}
    stages = []
    for s in range(garbage_stages):
        stages.append({x for x in final | garbage if len(x) <= s})
    for s in range(flicker):
        stages.append({x for x in final if len(x) < depth or s % 2 == 1})
    return {"depth": depth, "name": f"staged-{seed}",
            "stages": [sorted(string_code(x) for x in st) for st in stages]}


def static_full_tree(depth: int = 6, num_stages: int = 4) -> dict:
    nodes = sorted(string_code(x) for n in range(depth + 1) for x in strings_of_length(n))
    return {"depth": depth, "name": "static-full", "stages": [nodes] * num_stages}


def triangle_instances() -> list[dict]:
    out = [_doc("triangle", "static-full", {"tree": static_full_tree()})]
    for seed in range(11):
        out.append(_doc("triangle", f"staged-{seed}", {"tree": staged_tree(seed)}))
    return out


# --------------------------------------------------------------------------
# forcing


def superlow_instances() -> list[dict]:
    sets = [
        ("full-12", {"full": True, "depth": 12}, [F_BIT_E, F_BIT0, F_TRUE, F_FALSE, F_PAIR, F_SCAN]),
        ("no11-12", {"avoid": ["11"], "depth": 12}, [F_PAIR, F_BIT_E, F_SCAN, F_BIT_E_ZERO, F_TRUE, F_BIT0]),
        ("no00-10", {"avoid": ["00"], "depth": 10}, [F_BIT0, F_BIT_E_ZERO, F_BIT_E, F_SCAN, F_PAIR]),
        ("no101-8", {"avoid": ["101"], "depth": 8}, [F_SCAN, F_BIT_E, F_PAIR, F_FALSE]),
        ("no1-6", {"avoid": ["1"], "depth": 6}, [F_BIT_E, F_BIT_E_ZERO, F_SCAN]),
        ("full-empty", {"full": True, "depth": 12}, []),
    ]
    return [_doc("superlow", name, {"tree": tree, "formulas": fs}) for name, tree, fs in sets]


def simpson_smith_instances() -> list[dict]:
    return [
        _doc("simpson-smith", "bit0", {"tree": {"full": True, "depth": 6}, "formulas": [[F_BIT0, 0]]}),
        _doc("simpson-smith", "mixed", {"tree": {"avoid": ["11"], "depth": 8},
                                        "formulas": [[F_BIT_E, 1], [F_PAIR, 2], [F_SCAN, 3]]}),
        _doc("simpson-smith", "empty", {"tree": {"full": True, "depth": 6}, "formulas": []}),
    ]


# --------------------------------------------------------------------------
# jump inversion

PRIMES = [2, 3, 5, 7, 11, 13]


def inversion_instances() -> list[dict]:
    evens = range(0, 64, 2)
    rng = random.Random(2606)
    cs = [("empty", _table([])), ("evens", _table(evens)), ("odds", _table(range(1, 64, 2))),
          ("primes", _table(PRIMES)), ("all", _table([], default=1))]
    cs += [(f"random-{i}", _table(x for x in range(16) if rng.random() < 0.5)) for i in range(3)]
    as_ = [("empty", _table([])), ("evens", _table(evens)), ("squares", _table([0, 1, 4, 9]))]
    out = []
    for i, (cname, c) in enumerate(cs):
        aname, a = as_[i % len(as_)]
        out.append(_doc("inversion", f"A={aname},C={cname}",
                        {"a": a, "c": c, "programs": INVERSION_PROGRAMS, "code_range": 16},
                        {"stages": 80}))
    out.append(_doc("inversion", "A=empty,C=evens,standard",
                    {"a": _table([]), "c": _table(evens), "code_range": 16}))
    out.append(_doc("inversion", "A=evens,C=primes,standard",
                    {"a": _table(evens), "c": _table(PRIMES), "code_range": 16}))
    return out


# --------------------------------------------------------------------------
# Post reduction


def _desc(matrix, x_range, r1, r2, name):
    return {"matrix": matrix, "x_range": x_range, "y1_range": r1, "y2_range": r2,
            "name": name, "cap": 10_000}


def post_instances() -> list[dict]:
    out = []
    for k in (0, 2, 5):
        out.append(_doc("post", f"ge-{k}", {"descriptor": _desc(_ge(k), 16, 12, 4, f"ge-{k}")}))
    for k in (0, 1, 3):
        out.append(_doc("post", f"eq2-{k}", {"descriptor": _desc(_eq2(k), 16, 8, 2, f"eq2-{k}")}))
    for k in (0, 4, 9):
        out.append(_doc("post", f"ne-{k}", {"descriptor": _desc(_ne(k), 16, 2, 8, f"ne-{k}")}))
    out.append(_doc("post", "ge-wide", {"descriptor": _desc(_ge(0), 16, 32, 32, "ge-wide")}))
    for oname, o in (("evens", _table(range(0, 64, 2))), ("sparse", _table([3, 11])),
                     ("empty", _table([]))):
        out.append(_doc("post", f"above-{oname}",
                        {"descriptor": _desc(ORACLE_ABOVE, 16, 16, 2, "above"), "oracle": o}))
    for oname, o in (("sparse", _table([2, 6])), ("dense", _table(range(1, 12)))):
        out.append(_doc("post", f"quiet-{oname}",
                        {"descriptor": _desc(ORACLE_QUIET, 12, 12, 12, "quiet"), "oracle": o}))
    for doc in out:
        doc["budgets"] = {"cap": 50_000}
    return out


# --------------------------------------------------------------------------
# coding lemmas


def regular_instances(n: int = 20) -> list[dict]:
    rng = random.Random(1402)
    out = []
    for i in range(n):
        size = rng.randint(4, 16)
        c = _table(x for x in range(size) if rng.random() < 0.5)
        anchors = []
        s = 0
        for a in range(size):
            s += rng.randint(0, 3)
            anchors.append([a, s])
        out.append(_doc("regularize", f"random-{i}", {"c": c, "anchors": anchors}))
    return out


# blocking targets sit in rows coded late (or never), where extensions can still reach them
SPECTOR_PROGRAMS = [_member_prog([pair(0, 8)]), _member_prog([pair(1, 8), pair(0, 9)]),
                    _member_prog([pair(2, 8), pair(0, 12)], need_all=False), F_FALSE,
                    _member_prog([pair(0, 10)]),
                    _member_prog([pair(0, 8), pair(1, 8), pair(0, 9)]),
                    _member_prog([pair(3, 3)]), F_TRUE]


def spector_instances() -> list[dict]:
    evens = _table(range(0, 64, 2))
    return [
        _doc("spector", "single-empty", {"sets": [_table([])], "q": [0]}),
        _doc("spector", "evens-then-empty", {"sets": [evens, _table([])], "q": [0, 8],
                                             "programs": SPECTOR_PROGRAMS}),
        _doc("spector", "three-rows", {"sets": [_table(range(1, 64, 2)), evens, _table(PRIMES)],
                                       "q": [0, 3, 6], "programs": SPECTOR_PROGRAMS}),
    ]


# --------------------------------------------------------------------------
# pipeline

PIPELINE_FORMULAS = [[[F_BIT0, 0]], [[F_BIT_E, 1], [F_SCAN, 2]]]


def pipeline_instances() -> list[dict]:
    return [
        _doc("pipeline", "empty", {"a": _table([]), "trees": []}),
        _doc("pipeline", "one-tree", {"a": _table([]), "trees": [static_full_tree(4, 2)],
                                      "formulas": PIPELINE_FORMULAS[:1]}),
        _doc("pipeline", "two-trees", {"a": _table([]),
                                       "trees": [staged_tree(3, depth=5, garbage_stages=6, flicker=4),
                                                 staged_tree(7, depth=5, garbage_stages=6, flicker=4)],
                                       "formulas": PIPELINE_FORMULAS}),
    ]


# --------------------------------------------------------------------------
# everything


def all_instances() -> list[dict]:
    return (cohesive_instances() + [trivial_cohesive()] + separator_instances() + triangle_instances()
            + superlow_instances() + simpson_smith_instances() + inversion_instances()
            + post_instances() + regular_instances() + spector_instances() + pipeline_instances())


def by_name(kind: str, name: str) -> dict:
    for doc in all_instances():
        if doc["kind"] == kind and doc["name"] == name:
            return doc
    raise KeyError(f"{kind}/{name}")


# --------------------------------------------------------------------------
# negative controls: one tampering per checker, applied to a certificate


def _flip(bit):
    return 1 - bit if isinstance(bit, int) else ("1" if bit == "0" else "0")


def tamper(cert: dict) -> dict:
    """A copy of ``cert`` with one deliberate defect its checker must catch."""
    cert = copy.deepcopy(cert)
    p = cert["payload"]
    kind = cert["kind"]
    if kind == "cohesive":
        p["elements"] = [x if i % 2 else x + 1 for i, x in enumerate(p["elements"])]
    elif kind == "separator":
        p["separator"] = [0] * len(p["separator"])
    elif kind == "triangle":
        p["chain"] = p["chain"][:2] + p["chain"][3:]
    elif kind == "superlow":
        p["jump_table"][0] = _flip(p["jump_table"][0])
    elif kind == "simpson-smith":
        d = p["decisions"][0]
        d["kept_divergence"] = not d["kept_divergence"]
    elif kind == "inversion":
        last = [st for st in p["stages"] if st["strategy"] == "B" and st["success"]][-1]
        i = len(last["found"])
        flipped = last["sigma"][:i] + _flip(last["sigma"][i]) + last["sigma"][i + 1:]
        for st in p["stages"]:
            if st["sigma"] == last["sigma"]:
                st["sigma"] = flipped
        last["block"] = flipped[i:]
        p["b_prefix"] = flipped
    elif kind == "post":
        p["values"][0] = _flip(p["values"][0])
    elif kind == "regularize":
        a, s, b = p["triples"][0]
        p["triples"][0] = [a, s, _flip(b)]
        from .pairing import triple
        p["codes"][0] = triple(a, s, _flip(b))
    elif kind == "spector":
        row = max(int(k) for k in p["thresholds"])
        p["ones"] = sorted(set(p["ones"]) ^ {pair(63, row)})
    elif kind == "pipeline":
        link = p["chain"][-1]
        link["top"] = {"kind": "table", "default": 0, "entries": []}
    return cert


def negative_instances() -> list[dict]:
    """Instances whose certificates get tampered, one per kind."""
    picks = {"cohesive": "bits-3-", "separator": None, "triangle": "staged-0", "superlow": "full-12",
             "simpson-smith": "bit0", "inversion": "A=empty,C=evens", "post": "ge-0",
             "regularize": "random-0", "spector": "evens-then-empty", "pipeline": "one-tree"}
    out = []
    docs = all_instances()
    for kind, prefix in picks.items():
        for doc in docs:
            if doc["kind"] == kind and (prefix is None or doc["name"].startswith(prefix)):
                out.append(doc)
                break
    return out


def separator_instances() -> list[dict]:
    evens_lt = _desc(_eq2(0), 8, 4, 2, "evens")
    odds = _desc(_eq2(1), 8, 4, 2, "odds")
    none = _desc(F_FALSE.replace("ARITY 1", "ARITY 3").replace("loop: JMP loop", "HALT 0"), 8, 2, 2, "none")
    return [
        _doc("separator", "evens-vs-odds", {"a0": evens_lt, "a1": odds}),
        _doc("separator", "none-vs-odds", {"a0": none, "a1": odds}),
    ]
