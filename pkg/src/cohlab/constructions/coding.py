"""Coding sets into explicit finite data: regular codings by triples and Spector-style row coding."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

from .. import vm
from ..errors import UndecidableAtCap
from ..pairing import pair, triple
from ..sets import Oracle
from ..vm import Halted, Program, StillRunning


@dataclass
class RegularCoding:
    anchors: list[tuple[int, int]]
    triples: list[tuple[int, int, int]]

    @property
    def codes(self) -> list[int]:
        return [triple(a, s, i) for a, s, i in self.triples]

    def to_json(self):
        return {"anchors": [list(x) for x in self.anchors],
                "triples": [list(t) for t in self.triples], "codes": self.codes}


def regularize(c: Oracle, anchors: Sequence[tuple[int, int]]) -> RegularCoding:
    """``D = {<a_n, s_n, C(a_n)>}``; anchors must increase in the pairing order."""
    anchors = [(int(a), int(s)) for a, s in anchors]
    keys = [pair(a, s) for a, s in anchors]
    for i in range(1, len(keys)):
        if keys[i] <= keys[i - 1]:
            raise ValueError(f"anchor {anchors[i]} does not increase past {anchors[i - 1]}")
    return RegularCoding(anchors, [(a, s, c(a)) for a, s in anchors])


# --------------------------------------------------------------------------
# Spector coding


@dataclass
class BlockingStage:
    stage: int
    q: int
    delta: list[int]          # positions added (each set to 1)
    convergent: list[int]     # e < q with Phi_e^delta(e) halting
    searched: int
    base_ones: list[int]      # ones of beta_n before the extension
    pool: list[int]           # positions the extension could use

    def to_json(self):
        return {"stage": self.stage, "q": self.q, "delta": self.delta, "convergent": self.convergent,
                "searched": self.searched, "base_ones": self.base_ones, "pool": self.pool}


@dataclass
class SpectorResult:
    width: int
    q: list[int]
    ones: list[int]           # B as a finite set of positions pair(x, row)
    thresholds: dict[int, int]
    log: list[BlockingStage] = field(default_factory=list)

    def row(self, y: int) -> list[int]:
        ones = set(self.ones)
        return [int(pair(x, y) in ones) for x in range(self.width)]

    def to_json(self):
        return {"width": self.width, "q": self.q, "ones": self.ones,
                "thresholds": {str(k): v for k, v in sorted(self.thresholds.items())},
                "log": [st.to_json() for st in self.log]}


def _converges(p: Program, e: int, ones: frozenset, cap: int, stage: int) -> bool:
    res = vm.decide_program(p, [e], lambda q: int(q in ones), cap)
    if isinstance(res, StillRunning):
        raise UndecidableAtCap(f"Phi_{e}({e}) relative to a finite extension", stage)
    return isinstance(res, Halted)


def spector_code(sets: Sequence[Oracle], q: Sequence[int], *, width: int = 64,
                 ext_size: int = 2, pool_size: int = 12, cap: int = 2_000,
                 enumeration: Callable[[int], Program] = vm.decode) -> SpectorResult:
    """Code ``sets[n]`` into row ``q[n]`` of B, blocking convergence as far as finite extensions allow.

    Stage n+1 first picks, among extensions of the decided part by at most
    ``ext_size`` new elements from the first ``pool_size`` undecided
    positions, one maximizing ``{e < q[n] : Phi_e(e) halts}``; ties go
    to the smallest extension, then the lex-least.  Then row ``q[n]`` is
    filled from ``sets[n]`` and the other rows below ``q[n+1]`` with 0,
    on columns ``x < width``.
    """
    m = len(sets)
    q = list(q)
    if m > len(q):
        raise ValueError("need a row index for every set")
    if not q or q[0] != 0 or any(a >= b for a, b in zip(q, q[1:])):
        raise ValueError("q must increase from 0")
    decided: dict[int, int] = {}
    programs = [enumeration(e) for e in range(max(q[:m]) if m else 0)]
    log = []
    for n in range(m):
        qn = q[n]
        base = frozenset(p for p, b in decided.items() if b)
        pool, p = [], 0
        while len(pool) < pool_size:
            if p not in decided:
                pool.append(p)
            p += 1
        best, best_conv, searched = (), [], 0
        for size in range(ext_size + 1):
            for ext in combinations(pool, size):
                searched += 1
                ones = base | frozenset(ext)
                conv = [e for e in range(qn) if _converges(programs[e], e, ones, cap, n + 1)]
                if len(conv) > len(best_conv) or searched == 1:
                    best, best_conv = ext, conv
        for p in best:
            decided[p] = 1
        log.append(BlockingStage(n + 1, qn, list(best), best_conv, searched,
                                 sorted(base), pool))
        nxt = q[n + 1] if n + 1 < len(q) else qn + 1
        for x in range(width):
            decided.setdefault(pair(x, qn), sets[n](x))
        for y in range(nxt):
            if y == qn or y in q[:n]:
                continue
            for x in range(width):
                decided.setdefault(pair(x, y), 0)
    ones = sorted(p for p, b in decided.items() if b)
    result = SpectorResult(width, q[:m], ones, {}, log)
    rows = {y for n in range(m) for y in range((q[n + 1] if n + 1 < len(q) else q[n] + 1))}
    for y in sorted(rows):
        target = sets[q.index(y)] if y in q[:m] else (lambda x: 0)
        row = result.row(y)
        bad = [x for x in range(width) if row[x] != target(x)]
        result.thresholds[y] = bad[-1] + 1 if bad else 0
    return result
