"""Forcing over truncated trees: the superlow basis construction and the Simpson-Smith path.

A formula is a program run with a finite string as its oracle.  It *holds*
on ``sigma`` when it halts without asking about a position past the end of
``sigma``; a question past the end counts as "not yet", which makes the
divergence class ``{sigma : formula does not hold}`` closed downward, i.e.
a tree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .. import vm
from ..errors import UndecidableAtCap
from ..trees import TruncatedTree
from ..vm import Halted, Program, QueryOutOfRange, StillRunning


def string_oracle(sigma: str):
    def ask(q):
        if q >= len(sigma):
            raise QueryOutOfRange(q)
        return int(sigma[q])
    return ask


def holds(p: Program, x: int, sigma: str, cap: int, stage=None) -> bool:
    try:
        res = vm.decide_program(p, [x], string_oracle(sigma), cap)
    except QueryOutOfRange:
        return False
    if isinstance(res, StillRunning):
        raise UndecidableAtCap(f"formula on {x} with oracle {sigma!r}", stage)
    return isinstance(res, Halted)


@dataclass
class ForcingDecision:
    e: int
    x: int
    kept_divergence: bool   # the divergence class was viable and was intersected in
    branch: str             # prefix fixed by the following leftmost step
    queries: list[dict] = field(default_factory=list)

    def to_json(self):
        return {"e": self.e, "x": self.x, "kept_divergence": self.kept_divergence,
                "branch": self.branch, "queries": self.queries}


@dataclass
class ForcingTranscript:
    depth: int
    cap: int
    decisions: list[ForcingDecision]
    path_prefix: str
    jump_table: list[int]

    @property
    def formula_budget(self) -> int:
        return len(self.decisions)

    def table_queries(self) -> int:
        return sum(1 for d in self.decisions for q in d.queries if q["kind"] == "table")

    def to_json(self):
        return {"depth": self.depth, "cap": self.cap, "formula_budget": self.formula_budget,
                "decisions": [d.to_json() for d in self.decisions],
                "path_prefix": self.path_prefix, "jump_table": list(self.jump_table),
                "table_queries": self.table_queries()}


def _force(t: TruncatedTree, formulas: Sequence[tuple[Program, int]], cap: int):
    """Shared loop: try the divergence class, then take one leftmost step."""
    if not t.viable():
        from ..errors import DeadEnd
        raise DeadEnd("")
    current = t
    prefix = ""
    decisions = []
    for e, (p, x) in enumerate(formulas):
        stage = 2 * e + 1
        candidate = current.intersect(lambda s, p=p, x=x, st=stage: not holds(p, x, s, cap, st),
                                      name=f"U{e}")
        viable = candidate.viable()
        queries = [{"stage": stage, "kind": "table", "question": f"viable(T{2 * e} & U{e})",
                    "answer": int(viable)}]
        if viable:
            current = candidate
        if len(prefix) < t.depth:
            prefix = current.leftmost_viable_extension(prefix)
            current = current.cone(prefix)
        decisions.append(ForcingDecision(e, x, viable, prefix, queries))
    return current, decisions


def superlow_basis(t: TruncatedTree, formulas: Sequence[Program], cap: int = 2_000) -> ForcingTranscript:
    """Odd stages decide ``Phi_e(e)`` by asking if the divergence class stays viable; even stages go leftmost.

    ``jump_table[e]`` is 1 exactly when the divergence class was empty at the
    depth, so every path left in the tree makes formula ``e`` halt.
    """
    final, decisions = _force(t, [(p, e) for e, p in enumerate(formulas)], cap)
    prefix = final.leftmost_path()
    table = [0 if d.kept_divergence else 1 for d in decisions]
    return ForcingTranscript(t.depth, cap, decisions, prefix, table)


@dataclass
class SimpsonSmithResult:
    path_prefix: str
    decisions: list[ForcingDecision]
    cap: int

    def to_json(self):
        return {"path_prefix": self.path_prefix, "cap": self.cap,
                "decisions": [d.to_json() for d in self.decisions]}


def simpson_smith_path(t: TruncatedTree, formulas: Sequence[tuple[Program, int]],
                       cap: int = 2_000) -> SimpsonSmithResult:
    """Intersect with each divergence class ``{sigma : not phi_n^sigma(x)}`` when viable.

    After every formula one leftmost step is taken, so the prefix keeps
    growing; the final prefix is completed leftmost to the depth.
    """
    final, decisions = _force(t, formulas, cap)
    return SimpsonSmithResult(final.leftmost_path(), decisions, cap)
