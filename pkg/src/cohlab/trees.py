"""Binary strings, truncated binary trees and uniform families of relations.

Strings are Python ``str`` over ``"01"``.  Their numeric code prepends a 1
and reads the result in binary, so ``""`` is 1, ``"0"`` is 2, ``"1"`` is 3.
Within a length, code order is lexicographic order.

A truncated tree stands in for an infinite one: "infinite" is replaced by
"has a node at the truncation depth".
"""
from __future__ import annotations

from collections import Counter
from itertools import product
from typing import Callable, Iterable, Sequence

from . import vm
from .errors import DeadEnd, NodeBudgetExceeded, NotATree, OracleBudgetError
from .vm import Halted, Program

DEFAULT_NODE_BUDGET = 1 << 22


def string_code(s: str) -> int:
    return int("1" + s, 2)


def string_from_code(n: int) -> str:
    if n < 1:
        raise ValueError("string codes start at 1")
    return bin(n)[3:]


def strings_of_length(n: int) -> list[str]:
    return ["".join(bits) for bits in product("01", repeat=n)]


def all_strings(max_len: int) -> list[str]:
    return [s for n in range(max_len + 1) for s in strings_of_length(n)]


def is_prefix(a: str, b: str) -> bool:
    return b.startswith(a)


def compatible(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


def _program_predicate(p: Program, budget: int) -> Callable[..., bool]:
    def member(*args):
        res = vm.run(p, list(args), lambda x: 0, budget)
        if not isinstance(res, Halted):
            raise OracleBudgetError("membership program did not halt")
        return res.value != 0
    return member


class TruncatedTree:
    """A binary tree inspected up to ``depth``.

    ``membership`` is a predicate on strings or an explicit collection of
    nodes.  ``stage_family`` optionally gives the stages of a limit
    approximation, either as a callable ``s -> predicate`` or as a list of
    node collections; when ``membership`` is omitted the last stage is used.
    """

    def __init__(self, membership=None, depth: int = 0, stage_family=None,
                 num_stages: int | None = None, node_budget: int = DEFAULT_NODE_BUDGET,
                 name: str = ""):
        self.depth = depth
        self.node_budget = node_budget
        self.name = name
        self.num_stages = num_stages
        self._stage_family = None
        if stage_family is not None:
            if callable(stage_family):
                if num_stages is None:
                    raise ValueError("a callable stage family needs num_stages")
                self._stage_family = stage_family
            else:
                stages = [frozenset(st) for st in stage_family]
                self.num_stages = len(stages)
                self._stage_family = lambda s: stages[s].__contains__
                self._explicit_stages = stages
        if membership is None:
            if self._stage_family is None:
                raise ValueError("need membership or a stage family")
            membership = self._stage_family(self.num_stages - 1)
        if not callable(membership):
            nodes = frozenset(membership)
            membership = nodes.__contains__
            self._explicit = nodes
        self._member = membership
        self._nodes: frozenset[str] | None = None
        self._viable: frozenset[str] | None = None

    # -- membership and materialization

    def contains(self, s: str) -> bool:
        if len(s) > self.depth:
            return False
        return s in self.materialize()

    __contains__ = contains

    def materialize(self) -> frozenset[str]:
        if self._nodes is None:
            if self.depth * (1 << self.depth) > self.node_budget:
                raise NodeBudgetExceeded(f"depth {self.depth} exceeds node budget")
            nodes = set()
            for n in range(self.depth + 1):
                for s in strings_of_length(n):
                    if self._member(s):
                        nodes.add(s)
            for s in sorted(nodes, key=lambda t: (len(t), t)):
                if s and s[:-1] not in nodes:
                    raise NotATree(s[:-1])
            self._nodes = frozenset(nodes)
        return self._nodes

    def nodes_sorted(self) -> list[str]:
        return sorted(self.materialize(), key=lambda t: (len(t), t))

    # -- viability

    def _viable_nodes(self) -> frozenset[str]:
        if self._viable is None:
            nodes = self.materialize()
            viable = {s for s in nodes if len(s) == self.depth}
            for n in range(self.depth - 1, -1, -1):
                for s in strings_of_length(n):
                    if s in nodes and (s + "0" in viable or s + "1" in viable):
                        viable.add(s)
            self._viable = frozenset(viable)
        return self._viable

    def extendible(self, s: str) -> bool:
        """Some node at the truncation depth extends ``s``."""
        return s in self._viable_nodes()

    def viable(self) -> bool:
        return self.extendible("")

    def leftmost_viable_extension(self, s: str) -> str:
        if len(s) >= self.depth:
            raise ValueError(f"{s!r} is already at depth {self.depth}")
        if not self.contains(s):
            raise ValueError(f"{s!r} is not in the tree")
        for b in "01":
            if self.extendible(s + b):
                return s + b
        raise DeadEnd(s)

    def leftmost_path(self, start: str = "") -> str:
        s = start
        while len(s) < self.depth:
            s = self.leftmost_viable_extension(s)
        return s

    # -- derived trees

    def intersect(self, pred: Callable[[str], bool], name: str = "") -> "TruncatedTree":
        parent = self
        return TruncatedTree(lambda s: parent.contains(s) and pred(s), self.depth,
                             node_budget=self.node_budget, name=name)

    def cone(self, sigma: str) -> "TruncatedTree":
        return self.intersect(lambda s: compatible(s, sigma), f"cone({sigma})")

    # -- stages

    @property
    def staged(self) -> bool:
        return self._stage_family is not None

    def stage(self, s: int) -> "TruncatedTree":
        if self._stage_family is None:
            raise ValueError("tree has no stage family")
        return TruncatedTree(self._stage_family(s), self.depth, node_budget=self.node_budget)

    # -- serialization

    def to_json(self) -> dict:
        doc = {"depth": self.depth, "name": self.name}
        if hasattr(self, "_explicit_stages"):
            doc["stages"] = [sorted(string_code(s) for s in st) for st in self._explicit_stages]
        else:
            doc["nodes"] = sorted(string_code(s) for s in self.materialize())
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "TruncatedTree":
        depth = doc["depth"]
        name = doc.get("name", "")
        if "stages" in doc:
            stages = [[string_from_code(c) for c in st] for st in doc["stages"]]
            return cls(None, depth, stage_family=stages, name=name)
        if "nodes" in doc:
            return cls([string_from_code(c) for c in doc["nodes"]], depth, name=name)
        if "membership" in doc:
            pred = _program_predicate(vm.parse_program(doc["membership"]), doc.get("budget", 100_000))
            if "stage_program" in doc:
                stage_pred = _program_predicate(vm.parse_program(doc["stage_program"]),
                                                doc.get("budget", 100_000))
                return cls(lambda s: pred(string_code(s)), depth,
                           stage_family=lambda t: (lambda s: stage_pred(string_code(s), t)),
                           num_stages=doc["num_stages"], name=name)
            return cls(lambda s: pred(string_code(s)), depth, name=name)
        raise ValueError("tree document needs stages, nodes or membership")


def staged_tree_from_nodes(stages: Sequence[Iterable[str]], depth: int, name: str = "") -> TruncatedTree:
    return TruncatedTree(None, depth, stage_family=[set(st) for st in stages], name=name)


# --------------------------------------------------------------------------
# uniform families


class UniformFamily:
    """Relations ``R_0 .. R_{count-1}`` given by ``member(k, x)``."""

    def __init__(self, member: Callable[[int, int], object] | Program | str, count: int,
                 name: str = "", budget: int = 100_000):
        if isinstance(member, str):
            member = vm.parse_program(member)
        self.program = member if isinstance(member, Program) else None
        if self.program is not None:
            if self.program.arity != 2:
                raise ValueError("family programs take (k, x)")
            self._member = _program_predicate(self.program, budget)
        else:
            self._member = member
        self.count = count
        self.name = name
        self.budget = budget
        self._cache: dict[tuple[int, int], int] = {}

    def __call__(self, k: int, x: int) -> int:
        key = (k, x)
        if key not in self._cache:
            self._cache[key] = 1 if self._member(k, x) else 0
        return self._cache[key]

    def pattern(self, x: int, length: int | None = None) -> str:
        n = self.count if length is None else min(length, self.count)
        return "".join(str(self(k, x)) for k in range(n))

    def to_json(self) -> dict:
        if self.program is None:
            raise TypeError("only program-backed families serialize")
        return {"member": vm.pretty_print(self.program), "count": self.count, "name": self.name}

    @classmethod
    def from_json(cls, doc: dict) -> "UniformFamily":
        return cls(doc["member"], doc["count"], doc.get("name", ""))


class FamilyTree(TruncatedTree):
    """``sigma in T  <=>  more than |sigma| many x < witness_bound match sigma on k < count``."""

    def __init__(self, family: UniformFamily, witness_bound: int, depth: int | None = None):
        self.family = family
        self.witness_bound = witness_bound
        counts: Counter = Counter()
        for x in range(witness_bound):
            p = family.pattern(x)
            for n in range(len(p) + 1):
                counts[p[:n]] += 1
        self.prefix_counts = counts
        depth = family.count if depth is None else depth
        self._heavy = None
        super().__init__(self._in_tree, depth, name=f"family-tree({family.name})")

    def witnesses(self, s: str) -> int:
        return self.prefix_counts.get(s[: self.family.count], 0)

    def _in_tree(self, s: str) -> bool:
        return self.witnesses(s) > len(s)

    def contains(self, s: str) -> bool:
        return len(s) <= self.depth and self._in_tree(s)

    __contains__ = contains

    def extendible(self, s: str) -> bool:
        if not self.contains(s):
            return False
        m = min(self.depth, self.family.count)
        if len(s) >= m:
            return self.prefix_counts.get(s[:m], 0) > self.depth
        if self._heavy is None:
            heavy = set()
            for p, n in self.prefix_counts.items():
                if len(p) == m and n > self.depth:
                    heavy.update(p[:i] for i in range(m + 1))
            self._heavy = frozenset(heavy)
        return s in self._heavy


def tree_from_family(family: UniformFamily, witness_bound: int, depth: int | None = None) -> FamilyTree:
    return FamilyTree(family, witness_bound, depth)
