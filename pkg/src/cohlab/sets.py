"""Oracles, enumerable and limit-computable sets, the jump, and reductions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from . import vm
from .errors import (BoundViolation, NotComplementary, OracleBudgetError,
                     RegisterPressure, UndecidableAtCap, Unstable)
from .pairing import pair, unpair  # noqa: F401  re-exported
from .vm import FLAG, Assembler, Halted, Program, Diverges

DEFAULT_ORACLE_BUDGET = 100_000


# --------------------------------------------------------------------------
# oracles


class Oracle:
    """A total 0/1 membership predicate.  Subclasses are immutable."""

    def __init__(self):
        self._cache: dict[int, int] = {}

    def __call__(self, x: int) -> int:
        try:
            return self._cache[x]
        except KeyError:
            bit = self._cache[x] = self._member(x)
            return bit

    def _member(self, x: int) -> int:
        raise NotImplementedError

    def prefix(self, n: int) -> list[int]:
        return [self(x) for x in range(n)]

    def to_json(self) -> dict:
        raise TypeError(f"{type(self).__name__} is not serializable")


class TableOracle(Oracle):
    """Explicit finite table; every other point answers ``default``."""

    def __init__(self, entries: dict[int, int] | Sequence[int] = (), default: int = 0):
        super().__init__()
        if not isinstance(entries, dict):
            entries = {x: 1 for x in entries}
        self.entries = {int(x): int(bool(b)) for x, b in entries.items()}
        self.default = int(bool(default))

    @classmethod
    def from_bits(cls, bits: Sequence[int], default: int = 0) -> "TableOracle":
        return cls({i: b for i, b in enumerate(bits)}, default)

    def _member(self, x):
        return self.entries.get(x, self.default)

    def to_json(self):
        return {"kind": "table", "default": self.default,
                "entries": [[x, self.entries[x]] for x in sorted(self.entries)]}

    def __repr__(self):
        ones = sorted(x for x, b in self.entries.items() if b)
        return f"TableOracle(ones={ones}, default={self.default})"


class ProgramOracle(Oracle):
    """Membership computed by an arity-1 program (nonzero value = member).

    The program runs against ``inner`` (the empty set by default).  Running
    out of ``budget`` is an error, never a silent 0.
    """

    def __init__(self, program: Program | str, budget: int = DEFAULT_ORACLE_BUDGET,
                 inner: Oracle | None = None):
        super().__init__()
        if isinstance(program, str):
            program = vm.parse_program(program)
        if program.arity != 1:
            raise ValueError("oracle programs take one argument")
        self.program = program
        self.budget = budget
        self.inner = inner if inner is not None else TableOracle()

    def _member(self, x):
        res = vm.run(self.program, [x], self.inner, self.budget)
        if not isinstance(res, Halted):
            raise OracleBudgetError(f"oracle program exceeded {self.budget} steps on {x}")
        return 1 if res.value else 0

    def to_json(self):
        doc = {"kind": "program", "program": vm.pretty_print(self.program), "budget": self.budget}
        if not (isinstance(self.inner, TableOracle) and not self.inner.entries
                and self.inner.default == 0):
            doc["inner"] = self.inner.to_json()
        return doc


class JoinOracle(Oracle):
    """``left ⊕ right``: 2x asks ``left`` about x, 2x+1 asks ``right``."""

    def __init__(self, left: Oracle, right: Oracle):
        super().__init__()
        self.left, self.right = left, right

    def _member(self, x):
        return self.left(x // 2) if x % 2 == 0 else self.right(x // 2)

    def to_json(self):
        return {"kind": "join", "components": [self.left.to_json(), self.right.to_json()]}


class JumpOracle(Oracle):
    """Desk-scale view of ``base'``: halted by ``cap`` or loop-certified divergent."""

    def __init__(self, base: Oracle, cap: int):
        super().__init__()
        self.base, self.cap = base, cap

    def decide(self, e: int):
        return vm.decide_halting(e, self.base, self.cap)

    def _member(self, e):
        res = self.decide(e)
        if isinstance(res, Halted):
            return 1
        if isinstance(res, Diverges):
            return 0
        raise UndecidableAtCap(f"jump membership of index {e}")

    def member_program(self, p: Program, arg: int) -> int:
        """Jump membership for an explicit program, avoiding a round trip through the index."""
        res = vm.decide_program(p, [arg], self.base, self.cap)
        if isinstance(res, Halted):
            return 1
        if isinstance(res, Diverges):
            return 0
        raise UndecidableAtCap("jump membership of a built program")

    def to_json(self):
        return {"kind": "jump", "base": self.base.to_json(), "cap": self.cap}


class FunctionOracle(Oracle):
    """Wraps a Python predicate.  Handy in tests; not serializable."""

    def __init__(self, predicate: Callable[[int], object], name: str = "function"):
        super().__init__()
        self.predicate, self.name = predicate, name

    def _member(self, x):
        return 1 if self.predicate(x) else 0

    def __repr__(self):
        return f"FunctionOracle({self.name})"


EMPTY = TableOracle()


def oracle_from_json(doc: dict) -> Oracle:
    kind = doc.get("kind")
    if kind == "table":
        return TableOracle({int(x): int(b) for x, b in doc.get("entries", [])},
                           doc.get("default", 0))
    if kind == "program":
        inner = oracle_from_json(doc["inner"]) if "inner" in doc else None
        return ProgramOracle(doc["program"], doc.get("budget", DEFAULT_ORACLE_BUDGET), inner)
    if kind == "join":
        left, right = doc["components"]
        return JoinOracle(oracle_from_json(left), oracle_from_json(right))
    if kind == "jump":
        return JumpOracle(oracle_from_json(doc["base"]), doc["cap"])
    raise ValueError(f"unknown oracle kind {kind!r}")


# --------------------------------------------------------------------------
# enumerable and limit-computable sets


class EnumSet:
    """Enumerable set given by its monotone stage sets."""

    def __init__(self, stage: Callable[[int], frozenset], description: str = ""):
        self._stage = stage
        self.description = description

    def at(self, s: int) -> frozenset:
        return self._stage(s)

    def enumerated_by(self, x: int, s: int) -> bool:
        return x in self.at(s)


def jump(a: Oracle) -> EnumSet:
    """``a'`` as an enumerable set: stage s holds ``{e < s : Phi_e^a(e) halts in s steps}``."""
    def stage(s):
        return frozenset(e for e in range(s)
                         if isinstance(vm.run_index(e, e, a, s), Halted))
    return EnumSet(stage, "jump")


def program_enumeration(p: Program, a: Oracle) -> EnumSet:
    """Elements x < s on which ``p`` halts within s steps relative to ``a``."""
    def stage(s):
        return frozenset(x for x in range(s) if isinstance(vm.run(p, [x], a, s), Halted))
    return EnumSet(stage, "program")


class ApproxSet:
    """A stage-indexed 0/1 approximation ``approx(x, s)`` with optional modulus."""

    def __init__(self, approx: Callable[[int, int], int],
                 modulus: Callable[[int], int] | None = None, description: str = ""):
        self._approx = approx
        self.modulus = modulus
        self.description = description

    def at(self, x: int, s: int) -> int:
        return 1 if self._approx(x, s) else 0

    def limit(self, x: int, budget: int) -> int:
        """Limit value at ``x``, using at most ``budget`` stages.

        With a modulus the value at the modulus stage is returned (Unstable if
        the modulus lies beyond the budget).  Without one, the approximation
        must be constant on the second half of ``[0, budget]``.
        """
        if self.modulus is not None:
            m = self.modulus(x)
            if m > budget:
                raise Unstable(f"modulus {m} at {x} exceeds budget {budget}")
            return self.at(x, m)
        first = self.at(x, budget // 2)
        for s in range(budget // 2 + 1, budget + 1):
            if self.at(x, s) != first:
                raise Unstable(f"approximation at {x} still changing by stage {budget}")
        return first

    def check_modulus(self, xs, horizon: int) -> list[tuple[int, int]]:
        """Grid points (x, s) contradicting the modulus, s below ``horizon``."""
        if self.modulus is None:
            return []
        bad = []
        for x in xs:
            m = self.modulus(x)
            v = self.at(x, m)
            bad += [(x, s) for s in range(m, horizon) if self.at(x, s) != v]
        return bad


def approx_from_program(p: Program | str, modulus: Program | str | None = None,
                        budget: int = DEFAULT_ORACLE_BUDGET) -> ApproxSet:
    """ApproxSet from an arity-2 program ``(x, s) -> bit`` and an optional arity-1 modulus."""
    p = vm.parse_program(p) if isinstance(p, str) else p
    if p.arity != 2:
        raise ValueError("approximation programs take (x, s)")

    def approx(x, s):
        res = vm.run(p, [x, s], EMPTY, budget)
        if not isinstance(res, Halted):
            raise OracleBudgetError(f"approximation program exceeded {budget} steps")
        return res.value

    mod = None
    if modulus is not None:
        mod_oracle = vm.parse_program(modulus) if isinstance(modulus, str) else modulus

        def mod(x):
            res = vm.run(mod_oracle, [x], EMPTY, budget)
            if not isinstance(res, Halted):
                raise OracleBudgetError("modulus program exceeded budget")
            return res.value
    return ApproxSet(approx, mod, "program")


# --------------------------------------------------------------------------
# composition: C enumerated from B, B decided from A


def _general(p: Program) -> set[int]:
    return p.registers_used() - {FLAG}


def _product_block(asm: Assembler, progs, regmaps, exits, prefix: str) -> None:
    """Dovetail two programs one instruction at a time via their product control graph."""
    (p1, p2), (m1, m2), (x1, x2) = progs, regmaps, exits
    n1, n2 = len(p1), len(p2)

    def lab(i, j, turn):
        return f"{prefix}_{i}_{j}_{turn}"

    for i in range(n1):
        for j in range(n2):
            for turn in (0, 1):
                asm.label(lab(i, j, turn))
                p, m, here, exit_label = (p1, m1, i, x1) if turn == 0 else (p2, m2, j, x2)

                def nxt(k):
                    if k >= len(p):
                        return exit_label
                    return lab(k, j, 1) if turn == 0 else lab(i, k, 0)

                ins = p.instructions[here]
                if ins.op == "HALT":
                    asm.emit("JMP", target=exit_label)
                    continue
                if ins.op == "JMP":
                    asm.emit("JMP", target=nxt(ins.target))
                    continue
                r = m[ins.reg]
                if ins.op == "JZ":
                    asm.emit("JZ", r, nxt(ins.target))
                elif ins.op == "QUERY":
                    # private flag copy so the two programs cannot clobber each other
                    asm.emit("QUERY", r)
                    asm.clear(m[FLAG])
                    skip = asm.fresh("qf")
                    asm.emit("JZ", FLAG, skip)
                    asm.emit("INC", m[FLAG])
                    asm.label(skip)
                else:
                    asm.emit(ins.op, r)
                asm.emit("JMP", target=nxt(here + 1))


def compose_reduction(b_in: Program, b_out: Program, c_from_b: Program, *,
                      oracle: Oracle, test_range: int = 16, cap: int = 10_000) -> Program:
    """Program enumerating C from A, given semi-deciders for B and its complement from A.

    ``b_in`` halts on x iff x is in B, ``b_out`` halts iff x is not; both are
    checked to be complementary on ``range(test_range)`` relative to
    ``oracle``.  Each ``QUERY`` in ``c_from_b`` is replaced by a dovetailed run
    of the two semi-deciders that sets the flag to whichever halts first.
    """
    for p in (b_in, b_out, c_from_b):
        if p.arity != 1:
            raise ValueError("all three programs take one argument")
    for x in range(test_range):
        r_in = vm.decide_program(b_in, [x], oracle, cap)
        r_out = vm.decide_program(b_out, [x], oracle, cap)
        halts = (isinstance(r_in, Halted), isinstance(r_out, Halted))
        if halts.count(True) != 1:
            if isinstance(r_in, vm.StillRunning) or isinstance(r_out, vm.StillRunning):
                raise UndecidableAtCap(f"complementarity check at {x}")
            raise NotComplementary(f"B programs disagree at {x}: in={halts[0]}, out={halts[1]}")

    c_regs = _general(c_from_b)
    free = [r for r in range(vm.NUM_GENERAL) if r not in c_regs]
    need = len(_general(b_in)) + len(_general(b_out)) + 3
    if need > len(free):
        raise RegisterPressure(f"composition needs {need} free registers, {len(free)} available")
    maps = []
    for p in (b_in, b_out):
        m = {}
        for r in sorted(_general(p)):
            m[r] = free.pop(0)
        m[FLAG] = free.pop(0)
        maps.append(m)
    tmp = free.pop(0)

    asm = Assembler()
    n = len(c_from_b)
    for i, ins in enumerate(c_from_b.instructions):
        asm.label(f"c{i}")
        if ins.op != "QUERY":
            if ins.op in ("JZ", "JMP"):
                asm.emit(ins.op, ins.reg, f"c{ins.target}")
            elif ins.op == "HALT":
                asm.emit("HALT", ins.reg, value=ins.value)
            else:
                asm.emit(ins.op, ins.reg)
            continue
        for m in maps:
            for r in m.values():
                asm.clear(r)
        asm.move(ins.reg, maps[0][0], maps[1][0], tmp)
        asm.move(tmp, ins.reg)
        yes, no, after = asm.fresh("yes"), asm.fresh("no"), asm.fresh("after")
        _product_block(asm, (b_in, b_out), maps, (yes, no), asm.fresh("q"))
        asm.label(yes)
        asm.clear(FLAG)
        asm.emit("INC", FLAG)
        asm.emit("JMP", target=after)
        asm.label(no)
        asm.clear(FLAG)
        asm.label(after)
        asm.emit("JMP", target=f"c{i + 1}" if i + 1 < n else "end")
    asm.label("end")
    asm.emit("HALT", value=0)
    return asm.build(1)


# --------------------------------------------------------------------------
# Sigma_2 descriptors and the n = 1 case of Post's theorem


@dataclass
class Sigma2Descriptor:
    """``x in B  <=>  exists y1 < y1_range, forall y2 < y2_range: matrix(x, y1, y2)``.

    ``matrix`` is either an arity-3 program (accepts = halts with a nonzero
    value, run against the oracle) or a Python callable.  Agreement claims
    are made on the declared ranges only.
    """
    matrix: Program | Callable[[int, int, int], object]
    x_range: int
    y1_range: int
    y2_range: int
    name: str = ""
    cap: int = 10_000

    def __post_init__(self):
        if isinstance(self.matrix, str):
            self.matrix = vm.parse_program(self.matrix)
        if isinstance(self.matrix, Program) and self.matrix.arity != 3:
            raise ValueError("Sigma2 matrix programs take (x, y1, y2)")

    def accepts(self, x: int, y1: int, y2: int, oracle: Oracle = EMPTY) -> bool:
        if isinstance(self.matrix, Program):
            res = vm.run(self.matrix, [x, y1, y2], oracle, self.cap)
            if not isinstance(res, Halted):
                raise OracleBudgetError("matrix program did not halt within cap")
            return res.value != 0
        return bool(self.matrix(x, y1, y2))

    def holds(self, x: int, oracle: Oracle = EMPTY) -> bool:
        """Brute-force double loop over the declared ranges."""
        return any(all(self.accepts(x, y1, y2, oracle) for y2 in range(self.y2_range))
                   for y1 in range(self.y1_range))

    def to_json(self) -> dict:
        if not isinstance(self.matrix, Program):
            raise TypeError("only program-backed descriptors serialize")
        return {"matrix": vm.pretty_print(self.matrix), "x_range": self.x_range,
                "y1_range": self.y1_range, "y2_range": self.y2_range,
                "name": self.name, "cap": self.cap}

    @classmethod
    def from_json(cls, doc: dict) -> "Sigma2Descriptor":
        return cls(vm.parse_program(doc["matrix"]), doc["x_range"], doc["y1_range"],
                   doc["y2_range"], doc.get("name", ""), doc.get("cap", 10_000))


def counterexample_searcher(psi: Program, y2_range: int) -> Program:
    """Arity-3 program ``(x, y1, _)`` halting iff some ``y2 < y2_range`` makes ``psi`` reject.

    When every ``y2`` accepts it parks in a one-instruction loop, so
    divergence is loop-certifiable.
    """
    if psi.arity != 3:
        raise ValueError("psi takes (x, y1, y2)")
    if not _general(psi) <= {0, 1, 2}:
        raise RegisterPressure("psi may only use r0..r2 and the flag")
    X, Y1, TMP, Y2, REM = 0, 1, 2, 3, 4
    regmap = {0: 5, 1: 6, 2: 7, FLAG: FLAG}
    asm = Assembler()
    asm.clear(TMP)
    asm.set_const(REM, y2_range)
    asm.label("loop")
    asm.emit("JZ", REM, "park")
    for r in (5, 6, 7):
        asm.clear(r)
    asm.copy(X, 5, TMP)
    asm.copy(Y1, 6, TMP)
    asm.copy(Y2, 7, TMP)
    asm.inline(psi, regmap, "judge", result=TMP)
    asm.label("judge")
    asm.emit("JZ", TMP, "found")
    asm.clear(TMP)
    asm.emit("INC", Y2)
    asm.emit("DEC", REM)
    asm.emit("JMP", target="loop")
    asm.label("found")
    asm.emit("HALT", value=0)
    asm.label("park")
    asm.emit("JMP", target="park")
    return asm.build(3)


@dataclass
class PostReduction:
    """The Sigma_1(A') form of a Sigma_2(A) descriptor.

    ``x in B  <=>  exists y1: h(x, y1) not in A'`` where ``h(x, y1)`` is the
    index of ``searcher`` specialized at ``(x, y1)``.
    """
    descriptor: Sigma2Descriptor
    searcher: Program

    def h_program(self, x: int, y1: int) -> Program:
        return vm.specialize(self.searcher, [(0, x), (1, y1)])

    def h(self, x: int, y1: int) -> int:
        return vm.encode(self.h_program(x, y1))

    def evaluate(self, x: int, jump_oracle: JumpOracle) -> bool:
        for y1 in range(self.descriptor.y1_range):
            p = self.h_program(x, y1)
            # Phi_h(h): the program ignores its input, so any argument will do
            if not jump_oracle.member_program(p, 0):
                return True
        return False


def post_reduce(phi: Sigma2Descriptor) -> PostReduction:
    if not isinstance(phi.matrix, Program):
        raise ValueError("post_reduce needs a program-backed matrix")
    if phi.matrix.arity != 3:
        raise ValueError("psi must have arity 3")
    return PostReduction(phi, counterexample_searcher(phi.matrix, phi.y2_range))


# --------------------------------------------------------------------------
# weak truth-table reductions


class WttResult(NamedTuple):
    value: int
    queries: tuple[int, ...]
    steps: int


@dataclass
class WttReduction:
    """A reduction program with a computable step-and-use bound."""
    program: Program
    bound: Program | Callable[[int], int]
    bound_budget: int = 100_000

    def bound_at(self, x: int) -> int:
        if isinstance(self.bound, Program):
            res = vm.run(self.bound, [x], EMPTY, self.bound_budget)
            if not isinstance(res, Halted):
                raise OracleBudgetError("bound program did not halt")
            return res.value
        return int(self.bound(x))

    def to_json(self) -> dict:
        if not isinstance(self.bound, Program):
            raise TypeError("only program bounds serialize")
        return {"program": vm.pretty_print(self.program), "bound": vm.pretty_print(self.bound)}

    @classmethod
    def from_json(cls, doc):
        return cls(vm.parse_program(doc["program"]), vm.parse_program(doc["bound"]))


def wtt_apply(r: WttReduction, oracle: Oracle, x: int) -> WttResult:
    """Run ``r`` on ``x`` within its bound; BoundViolation if it is not genuinely wtt."""
    bound = r.bound_at(x)
    log: list[int] = []

    def logged(q):
        log.append(q)
        return oracle(q)

    res = vm.run(r.program, [x], logged, bound, check_arity=False)
    if not isinstance(res, Halted):
        raise BoundViolation(f"no halt within {bound} steps at {x}")
    high = [q for q in log if q >= bound]
    if high:
        raise BoundViolation(f"query {high[0]} at or above bound {bound} at {x}")
    return WttResult(res.value, tuple(log), res.steps)
