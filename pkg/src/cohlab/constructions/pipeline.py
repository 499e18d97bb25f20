"""Iterate: limit tree over the current top -> path -> jump inversion -> new top."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .. import vm
from ..errors import CohlabError
from ..sets import JoinOracle, Oracle, TableOracle
from ..trees import TruncatedTree, string_code
from ..vm import Program
from .forcing import simpson_smith_path
from .inversion import friedberg_invert


def realize_limit_tree(t: TruncatedTree) -> tuple[TruncatedTree, dict]:
    """The limit of the stages, with the stage after which each string stops changing.

    The question "does sigma change after stage s" is Sigma_1, so asking it
    of the jump for each s is how the limit becomes decidable there; over a
    finite stage list the answers are read off directly.
    """
    stages = [t.stage(s).materialize() for s in range(t.num_stages)]
    final = stages[-1]
    settle = {}
    for sigma in set().union(*stages):
        s = len(stages) - 1
        while s > 0 and (sigma in stages[s - 1]) == (sigma in final):
            s -= 1
        settle[sigma] = s
    limit = TruncatedTree(final, t.depth, name=f"limit({t.name})")
    return limit, {"settle": max(settle.values(), default=0), "nodes": len(final)}


@dataclass
class PipelineResult:
    links: list[dict] = field(default_factory=list)
    error: dict | None = None

    @property
    def length(self) -> int:
        return len(self.links)

    def to_json(self):
        doc = {"chain": self.links}
        if self.error is not None:
            doc["error"] = self.error
        return doc


def ideal_pipeline(a: Oracle, tree_specs: Sequence[TruncatedTree], *,
                   formulas: Sequence[Sequence[tuple[Program, int]]] = (),
                   stages: int = 25, cap: int = 2_000) -> PipelineResult:
    """One link per top oracle; the first link is ``a`` itself.

    ``formulas[i]`` are the forcing formulas used on tree ``i``.  ``stages``
    must reach a coding block at least as long as the tree depth.
    """
    result = PipelineResult([{"iteration": 0, "top": a.to_json()}])
    top = a
    for i, t in enumerate(tree_specs):
        try:
            limit, post = realize_limit_tree(t)
            forms = list(formulas[i]) if i < len(formulas) else []
            ss = simpson_smith_path(limit, forms, cap)
            c = TableOracle.from_bits([int(b) for b in ss.path_prefix])
            inv = friedberg_invert(top, c, stages, cap=cap)
            if len(inv.decoded_c()) < t.depth:
                raise CohlabError(f"iteration {i + 1}: coding block shorter than depth {t.depth}")
        except CohlabError as exc:
            result.error = {"iteration": i + 1, **exc.to_json()}
            return result
        b = TableOracle.from_bits([int(x) for x in inv.b_prefix])
        new_top = JoinOracle(top, b)
        result.links.append({
            "iteration": i + 1,
            "tree": t.to_json(),
            "post": post,
            "formulas": [[vm.pretty_print(p), x] for p, x in forms],
            "path": ss.to_json(),
            "inversion": inv.to_json(),
            "top": new_top.to_json(),
        })
        top = new_top
    return result
