"""Jump inversion above A: build B by initial segments so that C is coded into B and (A+B)' is pinned.

Two strategies alternate.  Strategy B looks for a string of length s
extending the current B-prefix that makes every index the jump guess calls
convergent actually converge within s steps; on success it appends that
string followed by the coding block C|s.  Strategy (A+B)' extends the jump
guess tau to length s, lex-least, where a 0 at e promises that e can still
be forced to converge above the current prefix.

Oracle positions for A+B: 2q asks A(q), 2q+1 asks B(q).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .. import vm
from ..errors import UndecidableAtCap
from ..sets import JumpOracle, Oracle
from ..vm import Diverges, Halted, Program, QueryOutOfRange, StillRunning


class _NeedBit(Exception):
    def __init__(self, pos):
        self.pos = pos


def _prefix_join(a: Oracle, b: str):
    def ask(q):
        if q % 2 == 0:
            return a(q // 2)
        pos = q // 2
        if pos >= len(b):
            raise QueryOutOfRange(q)
        return int(b[pos])
    return ask


def converges_within(p: Program, e: int, a: Oracle, b: str, steps: int) -> Halted | None:
    try:
        res = vm.run(p, [e], _prefix_join(a, b), steps, check_arity=False)
    except QueryOutOfRange:
        return None
    return res if isinstance(res, Halted) else None


class _Budget(Exception):
    pass


def completion_exists(reqs: list[tuple[int, Program]], a: Oracle, fixed: str, length: int,
                      steps: int, nodes: list[int]) -> bool:
    """Can ``fixed`` be completed to length ``length`` so every requirement halts within ``steps``?

    Only bits some computation reads get branched on.  ``nodes`` is a
    one-element countdown shared across calls; _Budget is raised when it runs out.
    """

    def search(assign):
        nodes[0] -= 1
        if nodes[0] < 0:
            raise _Budget

        def ask(q):
            if q % 2 == 0:
                return a(q // 2)
            pos = q // 2
            if pos < len(fixed):
                return int(fixed[pos])
            if pos >= length:
                raise QueryOutOfRange(q)
            if pos in assign:
                return assign[pos]
            raise _NeedBit(pos)

        for e, p in reqs:
            try:
                res = vm.run(p, [e], ask, steps, check_arity=False)
            except QueryOutOfRange:
                return False
            except _NeedBit as need:
                return search({**assign, need.pos: 0}) or search({**assign, need.pos: 1})
            if not isinstance(res, Halted):
                return False
        return True

    return search({})


def lex_least_extension(reqs, a, sigma, length, steps, node_budget):
    """The lex-least string of the given length above ``sigma`` meeting ``reqs``.

    Returns (string or None, whether the node budget ran out).
    """
    nodes = [node_budget]
    try:
        if not completion_exists(reqs, a, sigma, length, steps, nodes):
            return None, False
        fixed = sigma
        while len(fixed) < length:
            fixed += "0" if completion_exists(reqs, a, fixed + "0", length, steps, nodes) else "1"
        return fixed, False
    except _Budget:
        return None, True


@dataclass
class ForceResult:
    answer: str            # "yes", "no" or "unknown"
    witness: str = ""      # full B-string making every requirement halt
    steps: int = 0


def force_convergence(reqs: list[tuple[int, Program]], a: Oracle, base: str, cap: int,
                      branch_cap: int) -> ForceResult:
    """Is there a finite extension of ``base`` making every ``Phi_e(e)`` in ``reqs`` halt?

    Bits above ``base`` are chosen only when a computation asks for them.
    "no" needs every branch to end in a certified loop.
    """

    def search(assign: dict[int, int]) -> ForceResult:
        def ask(q):
            if q % 2 == 0:
                return a(q // 2)
            pos = q // 2
            if pos < len(base):
                return int(base[pos])
            if pos in assign:
                return assign[pos]
            raise _NeedBit(pos)

        # run everything on the bits known so far before branching: a certified
        # loop anywhere settles the branch whatever the other requirements want
        worst, need, stuck = 0, None, False
        for e, p in reqs:
            try:
                res = vm.decide_program(p, [e], ask, cap)
            except _NeedBit as exc:
                need = exc.pos if need is None else need
                continue
            if isinstance(res, Diverges):
                return ForceResult("no")
            if isinstance(res, StillRunning):
                stuck = True
                continue
            worst = max(worst, res.steps)
        if need is not None:
            if len(assign) >= branch_cap:
                return ForceResult("unknown")
            unknown = stuck
            for bit in (0, 1):
                r = search({**assign, need: bit})
                if r.answer == "yes":
                    return r
                unknown |= r.answer == "unknown"
            return ForceResult("unknown" if unknown else "no")
        if stuck:
            return ForceResult("unknown")
        top = max(assign, default=len(base) - 1)
        tail = "".join(str(assign.get(i, 0)) for i in range(len(base), top + 1))
        return ForceResult("yes", base + tail, worst)

    return search({})


@dataclass
class InversionStage:
    stage: int
    strategy: str            # "B" or "jump"
    success: bool
    sigma: str
    tau: str
    found: str | None = None
    block: str | None = None
    width_cap_bound: bool = False
    witnesses: list[dict] = field(default_factory=list)

    def to_json(self):
        return {"stage": self.stage, "strategy": self.strategy, "success": self.success,
                "sigma": self.sigma, "tau": self.tau, "found": self.found, "block": self.block,
                "width_cap_bound": self.width_cap_bound, "witnesses": self.witnesses}


@dataclass
class InversionTranscript:
    stages: list[InversionStage]
    cap: int
    width_cap: int

    @property
    def b_prefix(self) -> str:
        return self.stages[-1].sigma if self.stages else ""

    @property
    def tau(self) -> str:
        return self.stages[-1].tau if self.stages else ""

    @property
    def jump_guess(self) -> list[int]:
        return [1 - int(b) for b in self.tau]

    def decoded_c(self) -> list[int]:
        """C bits read off the last coding block."""
        done = [st for st in self.stages if st.strategy == "B" and st.success]
        return [int(b) for b in done[-1].block] if done else []

    def to_json(self):
        return {"cap": self.cap, "width_cap": self.width_cap, "b_prefix": self.b_prefix,
                "tau": self.tau, "jump_guess": self.jump_guess,
                "stages": [st.to_json() for st in self.stages]}


def friedberg_invert(a: Oracle, c: Oracle, stages: int, jump_a: JumpOracle | None = None, *,
                     enumeration: Callable[[int], Program] = vm.decode, cap: int | None = None,
                     width_cap: int = 1 << 14, branch_cap: int = 12) -> InversionTranscript:
    """Run ``stages`` stages, starting with Strategy B.

    The forcing questions of the jump strategy are Sigma_1 in A; they are
    answered by a bounded search whose step cap is taken from ``jump_a``
    when given.  ``width_cap`` bounds the search nodes Strategy B may spend
    in one stage; a stage where it binds is logged and counts as a failure.
    """
    if cap is None:
        cap = jump_a.cap if jump_a is not None else 2_000
    programs: dict[int, Program] = {}

    def prog(e):
        if e not in programs:
            programs[e] = enumeration(e)
        return programs[e]

    sigma, tau = "", ""
    strategy = "B"
    log: list[InversionStage] = []
    for s in range(1, stages + 1):
        if strategy == "B":
            zeros = [e for e, b in enumerate(tau) if b == "0"]
            found, capped = None, False
            if s >= len(sigma):
                reqs = [(e, prog(e)) for e in zeros]
                found, capped = lex_least_extension(reqs, a, sigma, s, s, width_cap)
            if found is not None:
                block = "".join(str(c(i)) for i in range(s))
                sigma = found + block
                strategy = "jump"
            log.append(InversionStage(s, "B", found is not None, sigma, tau, found,
                                      block if found is not None else None, capped))
        else:
            witnesses = []
            for e in range(len(tau), s):
                zeros = [i for i, b in enumerate(tau) if b == "0"] + [e]
                r = force_convergence([(i, prog(i)) for i in zeros], a, sigma, cap, branch_cap)
                if r.answer == "unknown":
                    raise UndecidableAtCap(f"forcing Phi_{e}({e}) above the B-prefix", s)
                if r.answer == "yes":
                    tau += "0"
                    witnesses.append({"e": e, "sigma": r.witness, "steps": r.steps})
                else:
                    tau += "1"
            log.append(InversionStage(s, "jump", True, sigma, tau, witnesses=witnesses))
            strategy = "B"
    return InversionTranscript(log, cap, width_cap)
