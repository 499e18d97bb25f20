"""Cohesive sets, Sigma_2 separation and Delta_2 paths: the three-way equivalence.

Each function turns an effective object of one kind into the next:
a path through a family tree gives a cohesive set, a cohesive set for the
right family gives a separator, a separator gives a path through a limit
tree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import NotCohesive, SearchExhausted, Unstable
from ..sets import ApproxSet, Oracle, Sigma2Descriptor, EMPTY
from ..trees import (TruncatedTree, UniformFamily, string_code, string_from_code,
                     tree_from_family)


@dataclass(frozen=True)
class StageRecord:
    stage: int
    element: int
    constraints: tuple[tuple[int, int], ...]  # (k, required R_k bit)


@dataclass(frozen=True)
class CohesiveOutput:
    elements: tuple[int, ...]
    log: tuple[StageRecord, ...] = field(default=(), compare=False)

    def to_json(self):
        return {"elements": list(self.elements),
                "log": [{"stage": r.stage, "element": r.element,
                         "constraints": [list(c) for c in r.constraints]} for r in self.log]}


def cohesive_from_path(family: UniformFamily, f: ApproxSet, count: int,
                       search_bound: int) -> CohesiveOutput:
    """Least-s construction of a cohesive set from an approximation ``f(k, s)`` to a path.

    Stage ``l`` (0-based) picks the least ``s`` above the previous element with
    ``R_k(s) == f(k, s)`` for every ``k < min(l, family.count)``.
    """
    if f.modulus is not None:
        late = [k for k in range(family.count) if f.modulus(k) >= search_bound]
        if late:
            raise Unstable(f"f does not settle below {search_bound} at k={late[0]}")
    elements, log = [], []
    s = 0
    for stage in range(count):
        width = min(stage, family.count)
        while s < search_bound:
            constraints = tuple((k, f.at(k, s)) for k in range(width))
            if all(family(k, s) == bit for k, bit in constraints):
                break
            s += 1
        else:
            raise SearchExhausted(stage, search_bound)
        elements.append(s)
        log.append(StageRecord(stage, s, constraints))
        s += 1
    return CohesiveOutput(tuple(elements), tuple(log))


def path_approximation(path: str) -> ApproxSet:
    """A path fixed outright, viewed as a limit approximation that never changes."""
    return ApproxSet(lambda k, s: int(path[k]), lambda k: 0, "fixed path")


def cohesive_via_family_tree(family: UniformFamily, witness_bound: int, count: int,
                             search_bound: int) -> tuple[str, CohesiveOutput]:
    """Leftmost path through the family tree, then the least-s construction along it."""
    tree = tree_from_family(family, witness_bound)
    path = tree.leftmost_path()
    return path, cohesive_from_path(family, path_approximation(path), count, search_bound)


# --------------------------------------------------------------------------
# separation from cohesiveness


def separation_family(f: ApproxSet, count: int) -> UniformFamily:
    """``R_x(s) <=> f(x, s) = 1`` for ``x < count``."""
    return UniformFamily(lambda x, s: f.at(x, s), count, "separation")


def separator_from_cohesive(f: ApproxSet, c: CohesiveOutput | tuple[int, ...], count: int,
                            min_tail: int | None = None) -> ApproxSet:
    """``D(x) = lim_{c in C} f(x, c)``, stage s reading f at the largest element of C up to s.

    ``C`` is first checked to be cohesive (on its finite prefix) for the
    derived family ``R_x(s) = [f(x, s) = 1]``, ``x < count``.
    """
    from ..verify import check_cohesive  # checker, not construction code

    elements = tuple(c.elements if isinstance(c, CohesiveOutput) else c)
    if not elements:
        raise NotCohesive("empty set")
    cert = check_cohesive(elements, separation_family(f, count), min_tail=min_tail)
    if not cert.valid:
        raise NotCohesive(cert.reason)
    last = elements[-1]

    def approx(x, s):
        below = [e for e in elements if e <= s]
        return f.at(x, below[-1]) if below else 0

    return ApproxSet(approx, lambda x: last, "separator")


def separation_approximation(a0: Sigma2Descriptor, a1: Sigma2Descriptor,
                             oracle: Oracle = EMPTY) -> ApproxSet:
    """A 0/1 function with ``{s : f(x, s) = i}`` infinite iff ``x not in A_i``.

    Before the quantifier ranges are exhausted it alternates; afterwards it
    sits at 1 on ``A_0``, at 0 on ``A_1`` and keeps alternating elsewhere.
    """
    settle = max(a0.y1_range, a0.y2_range, a1.y1_range, a1.y2_range)
    memo: dict[int, tuple[bool, bool]] = {}

    def approx(x, s):
        if s < settle:
            return s % 2
        if x not in memo:
            memo[x] = (a0.holds(x, oracle), a1.holds(x, oracle))
        in0, in1 = memo[x]
        if in0 and not in1:
            return 1
        if in1 and not in0:
            return 0
        return s % 2

    f = ApproxSet(approx, None, "separation approximation")
    f.settle = settle
    return f


# --------------------------------------------------------------------------
# Sigma_2 sets from a limit tree, and paths from separators


class _StageEntries:
    """For each string, the stages at which some node above it newly entered."""

    def __init__(self, t: TruncatedTree):
        self.num_stages = t.num_stages
        self.stages_above: dict[str, set[int]] = {}
        prev = t.stage(0).materialize()
        for s in range(1, t.num_stages):
            cur = t.stage(s).materialize()
            for tau in cur - prev:
                for i in range(len(tau) + 1):
                    self.stages_above.setdefault(tau[:i], set()).add(s)
            prev = cur

    def entered(self, sigma: str, s: int) -> bool:
        return s in self.stages_above.get(sigma, ())


def sigma2_from_tree(t: TruncatedTree) -> tuple[Sigma2Descriptor, Sigma2Descriptor]:
    """The two Sigma_2 sets of strings that say which side of ``sigma`` keeps growing.

    ``sigma in A_0`` iff there is a stage s after which nothing new enters
    above ``sigma1`` while something new still enters above ``sigma0``; A_1
    swaps the roles.  Strings are given by their codes.  The inner
    existential over the later entry stage is bounded by the number of
    stages, so it sits inside the matrix.
    """
    if not t.staged:
        raise ValueError("sigma2_from_tree needs a staged tree")
    entries = _StageEntries(t)
    n = t.num_stages

    def make(grow: str, quiet: str):
        def matrix(x, s, u):
            if x < 1:
                return False
            sigma = string_from_code(x)
            if not any(entries.entered(sigma + grow, v) for v in range(s + 1, n)):
                return False
            return u <= s or not entries.entered(sigma + quiet, u)
        return matrix

    x_range = 1 << t.depth  # codes of strings shorter than depth
    a0 = Sigma2Descriptor(make("0", "1"), x_range, n, n, name="A0")
    a1 = Sigma2Descriptor(make("1", "0"), x_range, n, n, name="A1")
    return a0, a1


@dataclass
class PathResult:
    approx: ApproxSet   # on string codes
    chain: list[str]


def path_from_separator(d: ApproxSet, t: TruncatedTree, budget: int) -> PathResult:
    """``sigma in P`` iff sigma is lex-least of its length with ``sigma(k) = D(sigma|k)`` for all k."""

    def approx(code, s):
        sigma = string_from_code(code)
        return int(all(d.at(string_code(sigma[:k]), s) == int(sigma[k]) for k in range(len(sigma))))

    modulus = None
    if d.modulus is not None:
        def modulus(code):
            sigma = string_from_code(code)
            return max([d.modulus(string_code(sigma[:k])) for k in range(len(sigma))], default=0)
    p = ApproxSet(approx, modulus, "path")

    chain = [""]
    for length in range(1, t.depth + 1):
        prev = chain[-1]
        bit = d.limit(string_code(prev), budget)
        # the defining condition pins every bit, so the lex-least candidate is the only one
        chain.append(prev + str(bit))
    return PathResult(p, chain)


# --------------------------------------------------------------------------
# the whole triangle


@dataclass
class TriangleRun:
    a0: Sigma2Descriptor
    a1: Sigma2Descriptor
    f: ApproxSet
    family_path: str
    cohesive: CohesiveOutput
    separator: ApproxSet
    path: PathResult


def run_triangle(t: TruncatedTree, *, witness_bound: int | None = None,
                 extra_elements: int = 16, tamper=None) -> TriangleRun:
    """Tree -> Sigma_2 pair -> cohesive set -> separator -> path.

    The separator must contain A_1 and avoid A_0, so the pair is handed to the
    separation step in swapped order.  ``tamper`` rewrites the separator
    before the path is read off; it exists for negative controls.
    """
    a0, a1 = sigma2_from_tree(t)
    f = separation_approximation(a1, a0)
    count = a0.x_range
    family = separation_family(f, count)
    settle = f.settle
    if witness_bound is None:
        witness_bound = settle + 4 * (count + 2)
    fam_tree = tree_from_family(family, witness_bound)
    family_path = fam_tree.leftmost_path()
    n_elements = count + extra_elements
    search_bound = witness_bound + 4 * n_elements
    cohesive = cohesive_from_path(family, path_approximation(family_path), n_elements, search_bound)
    d = separator_from_cohesive(f, cohesive, count, min_tail=extra_elements)
    if tamper is not None:
        d = tamper(d)
    path = path_from_separator(d, t, budget=cohesive.elements[-1])
    return TriangleRun(a0, a1, f, family_path, cohesive, d, path)
