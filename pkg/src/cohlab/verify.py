"""Independent checkers.

Everything here re-derives its verdict from the instance and the payload
using only the machine, the oracle classes and brute force.  Nothing in
this module runs construction code, with one exception: ``roundtrip_triangle``
is a composition test by definition, so it drives the constructions and then
judges the result with the checkers below.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import vm
from .errors import CohlabError, Unstable
from .pairing import pair, triple, untriple
from .sets import ApproxSet, JoinOracle, Oracle, Sigma2Descriptor, TableOracle, EMPTY
from .trees import TruncatedTree, UniformFamily, string_code, string_from_code
from .vm import Diverges, Halted, Program, QueryOutOfRange


@dataclass
class Certificate:
    kind: str
    payload: dict = field(default_factory=dict)
    verdict: str = "valid"
    reason: str | None = None

    @property
    def valid(self) -> bool:
        return self.verdict == "valid"

    def to_json(self) -> dict:
        doc = {"kind": self.kind, "payload": self.payload, "verdict": self.verdict}
        if self.reason is not None:
            doc["reason"] = self.reason
        return doc


def _ok(kind, **payload):
    return Certificate(kind, payload)


def _bad(kind, reason, **payload):
    return Certificate(kind, payload, "invalid", reason)


# --------------------------------------------------------------------------
# cohesiveness


def cohesive_thresholds(elements: Sequence[int], family: UniformFamily) -> list[tuple[int, int, int]]:
    """Per relation: (threshold element, side, tail length), the tail taken as long as possible."""
    out = []
    for k in range(family.count):
        side = family(k, elements[-1])
        i = len(elements) - 1
        while i > 0 and family(k, elements[i - 1]) == side:
            i -= 1
        out.append((elements[i], side, len(elements) - i))
    return out


def check_cohesive(elements: Sequence[int], family: UniformFamily, horizon: int | None = None,
                   min_tail: int | None = None) -> Certificate:
    """Every relation is eventually constant along the prefix, on a tail of at least ``min_tail``.

    ``min_tail`` defaults to half the prefix (rounded up).
    """
    elements = list(elements)
    if not elements:
        return _bad("cohesive", "empty")
    if any(a >= b for a, b in zip(elements, elements[1:])):
        return _bad("cohesive", "not-increasing")
    if horizon is not None and elements[-1] >= horizon:
        return _bad("cohesive", f"element {elements[-1]} beyond horizon {horizon}")
    need = (len(elements) + 1) // 2 if min_tail is None else min_tail
    thresholds = cohesive_thresholds(elements, family)
    payload = {"elements": elements,
               "thresholds": [{"k": k, "threshold": t, "side": b, "tail": n}
                              for k, (t, b, n) in enumerate(thresholds)],
               "min_tail": need}
    for k, (_, _, n) in enumerate(thresholds):
        if n < need:
            return _bad("cohesive", f"k={k}: tail {n} shorter than {need}", **payload)
    return _ok("cohesive", **payload)


def check_least_s(elements: Sequence[int], family: UniformFamily, f: ApproxSet) -> Certificate:
    """Exhaustive scan: each element is the least s past its predecessor meeting its stage's pattern."""
    prev = -1
    for stage, c in enumerate(elements):
        width = min(stage, family.count)

        def meets(s):
            return all(family(k, s) == f.at(k, s) for k in range(width))

        if c <= prev:
            return _bad("cohesive", f"stage {stage}: not increasing")
        if not meets(c):
            return _bad("cohesive", f"stage {stage}: {c} misses its pattern")
        for s in range(prev + 1, c):
            if meets(s):
                return _bad("cohesive", f"stage {stage}: {s} < {c} already qualifies")
        prev = c
    return _ok("cohesive", elements=list(elements))


# --------------------------------------------------------------------------
# separators and paths


def check_separator(d: ApproxSet, a0: Sigma2Descriptor, a1: Sigma2Descriptor,
                    xs: Sequence[int] | int, budget: int, oracle: Oracle = EMPTY) -> Certificate:
    """``A0 <= lim D`` and ``lim D`` avoids ``A1`` on ``xs``, all by brute force."""
    xs = range(xs) if isinstance(xs, int) else xs
    for x in xs:
        try:
            v = d.limit(x, budget)
        except Unstable as exc:
            return _bad("separator", f"x={x}: {exc}")
        if v == 0 and a0.holds(x, oracle):
            return _bad("separator", f"x={x} in A0 but not in D")
        if v == 1 and a1.holds(x, oracle):
            return _bad("separator", f"x={x} in A1 and in D")
    return _ok("separator", checked=len(xs))


def _chain_from_approx(p: ApproxSet, depth: int, budget: int) -> list[list[str]]:
    levels = []
    for n in range(depth + 1):
        lo, hi = 1 << n, 1 << (n + 1)
        levels.append([string_from_code(c) for c in range(lo, hi) if p.limit(c, budget)])
    return levels


def check_path(p: Sequence[str] | ApproxSet, t: TruncatedTree, budget: int = 0) -> Certificate:
    """One string per length up to the depth, each extending the last, all in ``t``."""
    if isinstance(p, ApproxSet):
        try:
            levels = _chain_from_approx(p, t.depth, budget)
        except Unstable as exc:
            return _bad("path", str(exc))
    else:
        levels = [[s for s in p if len(s) == n] for n in range(t.depth + 1)]
        if any(len(s) > t.depth for s in p):
            return _bad("path", "string beyond depth")
    chain = []
    for n, level in enumerate(levels):
        if len(level) != 1:
            return _bad("path", f"length {n}: {len(level)} strings")
        s = level[0]
        if chain and not s.startswith(chain[-1]):
            return _bad("path", f"{s!r} does not extend {chain[-1]!r}")
        if s not in t:
            return _bad("path", f"{s!r} not in tree", chain=chain + [s])
        chain.append(s)
    return _ok("path", chain=chain)


def tree_growth_sets(t: TruncatedTree) -> tuple[set[str], set[str]]:
    """Brute force over the stages: strings whose 0-side (resp. 1-side) outlasts the other.

    ``sigma`` is in the first set when some stage s has a new node above
    ``sigma0`` after s and none above ``sigma1`` after s.
    """
    stages = [t.stage(s).materialize() for s in range(t.num_stages)]
    new = [set()] + [stages[s] - stages[s - 1] for s in range(1, len(stages))]

    def grows_after(prefix, s):
        return any(any(tau.startswith(prefix) for tau in new[u]) for u in range(s + 1, len(new)))

    left, right = set(), set()
    for n in range(t.depth):
        for code in range(1 << n, 1 << (n + 1)):
            sigma = string_from_code(code)
            for s in range(len(new)):
                g0, g1 = grows_after(sigma + "0", s), grows_after(sigma + "1", s)
                if g0 and not g1:
                    left.add(sigma)
                if g1 and not g0:
                    right.add(sigma)
    return left, right


# --------------------------------------------------------------------------
# forcing transcripts


def _holds_on(p: Program, x: int, sigma: str, cap: int) -> bool | None:
    """Halts without reading past ``sigma``: True / False, None when undecided at the cap."""
    def ask(q):
        if q >= len(sigma):
            raise QueryOutOfRange(q)
        return int(sigma[q])
    try:
        res = vm.decide_program(p, [x], ask, cap)
    except QueryOutOfRange:
        return False
    if isinstance(res, Halted):
        return True
    if isinstance(res, Diverges):
        return False
    return None


def _check_forcing_chain(kind, payload, t, formulas, cap):
    prefix = payload["path_prefix"]
    if len(prefix) != t.depth:
        return f"path prefix has length {len(prefix)}, depth is {t.depth}"
    for n in range(len(prefix) + 1):
        if prefix[:n] not in t:
            return f"prefix {prefix[:n]!r} not in tree"
    decisions = payload["decisions"]
    if len(decisions) != len(formulas):
        return f"{len(decisions)} decisions for {len(formulas)} formulas"
    last = ""
    for d, (p, x) in zip(decisions, formulas):
        if not (d["branch"].startswith(last) and prefix.startswith(d["branch"])):
            return f"decision {d['e']}: branch {d['branch']!r} off the path"
        last = d["branch"]
        h = _holds_on(p, x, prefix, cap)
        if h is None:
            return f"formula {d['e']} undecided on the path prefix"
        # a retained divergence class contains the path; a dropped one was empty at the depth
        if d["kept_divergence"] == h:
            return f"formula {d['e']}: class {'kept' if d['kept_divergence'] else 'dropped'} but formula {'holds' if h else 'fails'} on path"
    return None


def check_superlow(payload: dict, t: TruncatedTree, formulas: Sequence[Program],
                   halt_catalog: Sequence[int] | None = None) -> Certificate:
    """Path in tree, jump table equal to replayed halting, table queries within ``2**n``."""
    cap = payload["cap"]
    n = len(formulas)
    why = _check_forcing_chain("superlow", payload, t, [(p, e) for e, p in enumerate(formulas)], cap)
    if why:
        return _bad("superlow", why)
    queries = sum(1 for d in payload["decisions"] for q in d["queries"] if q["kind"] == "table")
    if queries > 2 ** n:
        return _bad("superlow", f"{queries} table queries exceed {2 ** n}")
    table = payload["jump_table"]
    if len(table) != n:
        return _bad("superlow", "jump table length")
    path = payload["path_prefix"]
    annotated = range(n) if halt_catalog is None else halt_catalog
    replayed = {}
    for e in annotated:
        res = vm.decide_program(formulas[e], [e],
                                lambda q: int(path[q]) if q < len(path) else 0, cap)
        if isinstance(res, vm.StillRunning):
            return _bad("superlow", f"annotated index {e} undecided at cap {cap}")
        replayed[e] = int(isinstance(res, Halted))
        if replayed[e] != table[e]:
            return _bad("superlow", f"jump table bit {e} is {table[e]}, replay gives {replayed[e]}")
    return _ok("superlow", queries=queries, replayed=[replayed[e] for e in sorted(replayed)])


def check_simpson_smith(payload: dict, t: TruncatedTree,
                        formulas: Sequence[tuple[Program, int]]) -> Certificate:
    why = _check_forcing_chain("simpson-smith", payload, t, formulas, payload["cap"])
    if why:
        return _bad("path", why)
    return _ok("path", path_prefix=payload["path_prefix"])


# --------------------------------------------------------------------------
# jump inversion


def _join_prefix(a: Oracle, b: str):
    def ask(q):
        if q % 2 == 0:
            return a(q // 2)
        if q // 2 >= len(b):
            raise QueryOutOfRange(q)
        return int(b[q // 2])
    return ask


def _halts_within(p, e, a, b, steps):
    try:
        return isinstance(vm.run(p, [e], _join_prefix(a, b), steps, check_arity=False), Halted)
    except QueryOutOfRange:
        return False


class _OutOfNodes(Exception):
    pass


def _lex_least(progs, a, sigma, length, budget):
    """Lex-least completion of ``sigma`` to ``length`` making each program halt within ``length`` steps.

    A bit is tried at 0 first; a completion check enumerates only the bits
    the programs read.
    """
    left = [budget]

    def completable(fixed):
        def walk(extra):
            left[0] -= 1
            if left[0] < 0:
                raise _OutOfNodes
            unknown = []

            def ask(q):
                if q % 2 == 0:
                    return a(q // 2)
                i = q // 2
                if i >= length:
                    raise QueryOutOfRange(q)
                if i < len(fixed):
                    return int(fixed[i])
                if i in extra:
                    return extra[i]
                unknown.append(i)
                raise QueryOutOfRange(q)

            for e, p in progs:
                try:
                    res = vm.run(p, [e], ask, length, check_arity=False)
                except QueryOutOfRange:
                    if not unknown:
                        return False
                    i = unknown[0]
                    return walk({**extra, i: 0}) or walk({**extra, i: 1})
                if not isinstance(res, Halted):
                    return False
            return True
        return walk({})

    if not completable(sigma):
        return None
    out = sigma
    while len(out) < length:
        out += "0" if completable(out + "0") else "1"
    return out


def check_inversion(payload: dict, a: Oracle, c: Oracle, code_range: int,
                    enumeration: Callable[[int], Program] = vm.decode) -> Certificate:
    """Replay both strategies stage by stage, then decode C from the B-prefix."""
    width_cap = payload["width_cap"]
    capped_stages = 0
    sigma, tau, strategy = "", "", "B"
    decoded: list[int] = []
    for st in payload["stages"]:
        s = st["stage"]
        if st["strategy"] != strategy:
            return _bad("inversion", f"stage {s}: expected strategy {strategy}")
        if not st["sigma"].startswith(sigma) or not st["tau"].startswith(tau):
            return _bad("inversion", f"stage {s}: histories are not chains")
        if strategy == "B":
            if st["tau"] != tau:
                return _bad("inversion", f"stage {s}: tau changed under Strategy B")
            progs = [(e, enumeration(e)) for e, b in enumerate(tau) if b == "0"]
            if st["width_cap_bound"]:
                if st["success"] or st["sigma"] != sigma:
                    return _bad("inversion", f"stage {s}: capped stage changed the B-prefix")
                capped_stages += 1
                sigma, tau = st["sigma"], st["tau"]
                continue
            try:
                hit = _lex_least(progs, a, sigma, s, 16 * width_cap) if s >= len(sigma) else None
            except _OutOfNodes:
                return _bad("inversion", f"stage {s}: replay ran out of search nodes")
            if (hit is not None) != st["success"] or (hit is not None and st["found"] != hit):
                return _bad("inversion", f"stage {s}: Strategy B search replays to {hit!r}")
            if hit is not None:
                block = st["sigma"][len(hit):]
                if len(block) != s or st["sigma"] != hit + block:
                    return _bad("inversion", f"stage {s}: coding block malformed")
                decoded = [int(b) for b in block]
                strategy = "jump"
            elif st["sigma"] != sigma:
                return _bad("inversion", f"stage {s}: B-prefix moved without success")
        else:
            if st["sigma"] != sigma or len(st["tau"]) != max(s, len(tau)):
                return _bad("inversion", f"stage {s}: tau has the wrong length")
            witnessed = {w["e"]: w for w in st["witnesses"]}
            for e in range(len(tau), len(st["tau"])):
                if st["tau"][e] == "1":
                    continue
                w = witnessed.get(e)
                if w is None or not w["sigma"].startswith(sigma):
                    return _bad("inversion", f"stage {s}: no witness for e={e}")
                new_zeros = [i for i, b in enumerate(st["tau"][: e + 1]) if b == "0"]
                for i in new_zeros:
                    if not _halts_within(enumeration(i), i, a, w["sigma"], w["steps"]):
                        return _bad("inversion", f"stage {s}: witness for e={e} fails to make {i} halt")
            strategy = "B"
        sigma, tau = st["sigma"], st["tau"]
    if sigma != payload["b_prefix"] or tau != payload["tau"]:
        return _bad("inversion", "summary does not match the last stage")
    if len(decoded) < code_range:
        return _bad("inversion", f"coding reaches only {len(decoded)} < {code_range}")
    expected = [c(x) for x in range(code_range)]
    if decoded[:code_range] != expected:
        return _bad("inversion", "decoded C differs from C", decoded=decoded[:code_range])
    return _ok("inversion", decoded=decoded[:code_range], b_prefix=sigma,
               capped_stages=capped_stages)


# --------------------------------------------------------------------------
# coding lemmas


def decode_regular(codes: Sequence[int]) -> dict[int, int]:
    """``a in C  <=>  <a, s, 1> in D`` for some s."""
    out: dict[int, int] = {}
    for code in codes:
        a, _, i = untriple(code)
        out[a] = max(out.get(a, 0), i)
    return out


def check_regular(payload: dict, c: Oracle) -> Certificate:
    codes = payload["codes"]
    if any(x >= y for x, y in zip(codes, codes[1:])):
        return _bad("regular", "codes not increasing")
    if [triple(*t) for t in payload["triples"]] != codes:
        return _bad("regular", "codes do not match triples")
    decoded = decode_regular(codes)
    for a, _ in payload["anchors"]:
        if decoded.get(a) != c(a):
            return _bad("regular", f"anchor {a}: decodes to {decoded.get(a)}, C has {c(a)}")
    return _ok("regular", decoded={str(k): v for k, v in sorted(decoded.items())})


def check_spector(payload: dict, sets: Sequence[Oracle], ext_size: int, cap: int,
                  enumeration: Callable[[int], Program] = vm.decode) -> Certificate:
    """Rows agree above thresholds; each blocking choice is maximal over its search space."""
    from itertools import combinations

    width, q = payload["width"], payload["q"]
    ones = set(payload["ones"])
    thresholds = {int(k): v for k, v in payload["thresholds"].items()}
    rows = range(q[-1] + 1) if q else range(0)
    for y in rows:
        t = thresholds.get(y)
        if t is None:
            return _bad("spector", f"row {y} has no threshold")
        if t > width // 2:
            return _bad("spector", f"row {y}: threshold {t} leaves less than half the row")
        target = sets[q.index(y)] if y in q else (lambda x: 0)
        for x in range(t, width):
            if int(pair(x, y) in ones) != target(x):
                return _bad("spector", f"row {y} disagrees at column {x}")
    for st in payload["log"]:
        base = frozenset(st["base_ones"])
        if not base <= ones or not set(st["delta"]) <= ones:
            return _bad("spector", f"stage {st['stage']}: extension not kept in B")

        def conv(extra):
            o = base | frozenset(extra)
            out = []
            for e in range(st["q"]):
                res = vm.decide_program(enumeration(e), [e], lambda p: int(p in o), cap)
                if isinstance(res, vm.StillRunning):
                    return None
                if isinstance(res, Halted):
                    out.append(e)
            return out

        chosen = conv(st["delta"])
        if chosen != st["convergent"]:
            return _bad("spector", f"stage {st['stage']}: convergent set replays to {chosen}")
        for size in range(ext_size + 1):
            for ext in combinations(st["pool"], size):
                other = conv(ext)
                if other is None:
                    return _bad("spector", f"stage {st['stage']}: undecided at cap")
                if len(other) > len(chosen):
                    return _bad("spector", f"stage {st['stage']}: {list(ext)} blocks less",
                                better=list(ext))
    return _ok("spector", rows=len(rows))


# --------------------------------------------------------------------------
# pipeline


def check_pipeline(payload: dict, cap: int) -> Certificate:
    """Every link re-validated from its own recorded data."""
    from .sets import oracle_from_json

    chain = payload["chain"]
    if not chain:
        return _bad("pipeline", "empty chain")
    top = oracle_from_json(chain[0]["top"])
    for link in chain[1:]:
        i = link["iteration"]
        t = TruncatedTree.from_json(link["tree"])
        limit = TruncatedTree(t.stage(t.num_stages - 1).materialize(), t.depth)
        formulas = [(vm.parse_program(p), x) for p, x in link["formulas"]]
        path = link["path"]["path_prefix"]
        cert = check_simpson_smith(link["path"], limit, formulas)
        if not cert.valid:
            return _bad("pipeline", f"iteration {i}: {cert.reason}")
        c = TableOracle.from_bits([int(b) for b in path])
        cert = check_inversion(link["inversion"], top, c, len(path))
        if not cert.valid:
            return _bad("pipeline", f"iteration {i}: {cert.reason}")
        b = TableOracle.from_bits([int(x) for x in link["inversion"]["b_prefix"]])
        new_top = JoinOracle(top, b)
        if new_top.to_json() != link["top"]:
            return _bad("pipeline", f"iteration {i}: top snapshot does not match")
        top = new_top
    return _ok("pipeline", length=len(chain))


# --------------------------------------------------------------------------
# composition


def roundtrip_triangle(t: TruncatedTree, *, witness_bound: int | None = None,
                       extra_elements: int = 16,
                       tamper: Callable[[ApproxSet], ApproxSet] | None = None) -> Certificate:
    """Tree -> Sigma_2 pair -> cohesive set -> separator -> path, judged by the checkers here."""
    from .constructions.cohesive import run_triangle

    try:
        run = run_triangle(t, witness_bound=witness_bound, extra_elements=extra_elements,
                           tamper=tamper)
    except CohlabError as exc:
        return _bad("path", exc.reason)
    left, right = tree_growth_sets(t)
    for x in range(1, run.a0.x_range):
        sigma = string_from_code(x)
        if run.a0.holds(x) != (sigma in left) or run.a1.holds(x) != (sigma in right):
            return _bad("path", f"Sigma_2 descriptors disagree with the stages at {sigma!r}")
    cert = check_path(run.path.chain, t)
    payload = {"chain": run.path.chain, "cohesive": list(run.cohesive.elements),
               "family_path": run.family_path}
    if not cert.valid:
        return _bad("path", cert.reason, **payload)
    return _ok("path", **payload)
