"""Oracle register machine: assembly, Goedel numbering, step-bounded runs.

The machine has eight general registers ``r0``..``r7`` plus a flag register
(spelled ``flag`` in assembly, index 8).  ``QUERY r`` asks the oracle about
the value held in ``r`` and writes 0/1 into the flag.  Every executed
instruction costs one step.  Running past the last instruction halts with
value 0.

Assembly format, one instruction per line::

    ARITY 1
    # comments run to end of line
    top: JZ r0, done
    DEC r0
    JMP top
    done: HALT 1
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .pairing import decode_sequence, encode_sequence, pair, unpair

NUM_GENERAL = 8
FLAG = 8
NUM_REGISTERS = 9
OPCODES = ("INC", "DEC", "JZ", "JMP", "QUERY", "HALT")

Oracle = Callable[[int], object]


class AssemblyError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class QueryOutOfRange(Exception):
    """Raised by partial oracles when asked past the information they hold."""

    def __init__(self, x: int):
        self.x = x
        super().__init__(f"query {x} outside the known part of the oracle")


@dataclass(frozen=True)
class Instruction:
    op: str
    reg: int | None = None
    target: int | None = None
    value: int | None = None  # HALT immediate

    def registers(self) -> set[int]:
        return set() if self.reg is None else {self.reg}


@dataclass(frozen=True)
class Program:
    instructions: tuple[Instruction, ...]
    arity: int = 0

    def __post_init__(self):
        _validate(self.instructions, self.arity)

    def __len__(self):
        return len(self.instructions)

    @property
    def index(self) -> int:
        return encode(self)

    def registers_used(self) -> set[int]:
        used = set(range(self.arity))
        for ins in self.instructions:
            used |= ins.registers()
        return used

    def __str__(self):
        return pretty_print(self)


def _validate(instructions, arity):
    if not 0 <= arity <= NUM_GENERAL:
        raise AssemblyError(f"arity {arity} out of range 0..{NUM_GENERAL}")
    if not instructions:
        raise AssemblyError("empty program")
    n = len(instructions)
    for i, ins in enumerate(instructions):
        if ins.op not in OPCODES:
            raise AssemblyError(f"unknown opcode {ins.op!r} at instruction {i}")
        if ins.reg is not None and not 0 <= ins.reg < NUM_REGISTERS:
            raise AssemblyError(f"register {ins.reg} out of range at instruction {i}")
        if ins.op in ("JZ", "JMP") and not (ins.target is not None and 0 <= ins.target < n):
            raise AssemblyError(f"jump target {ins.target} out of range at instruction {i}")
        if ins.op in ("INC", "DEC", "JZ", "QUERY") and ins.reg is None:
            raise AssemblyError(f"{ins.op} needs a register at instruction {i}")
        if ins.op == "HALT" and (ins.reg is None) == (ins.value is None):
            raise AssemblyError(f"HALT needs exactly one operand at instruction {i}")


# --------------------------------------------------------------------------
# text format

_REG_RE = re.compile(r"^(?:r([0-7])|flag)$")
_LABEL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _reg_name(r: int) -> str:
    return "flag" if r == FLAG else f"r{r}"


def _parse_reg(tok: str, lineno: int) -> int:
    m = _REG_RE.match(tok)
    if not m:
        if re.match(r"^r\d+$", tok):
            raise AssemblyError(f"register {tok} out of range", lineno)
        raise AssemblyError(f"expected register, got {tok!r}", lineno)
    return FLAG if m.group(1) is None else int(m.group(1))


def parse_program(text: str) -> Program:
    arity = 0
    labels: dict[str, int] = {}
    pending = []  # (lineno, op, operands)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.upper().startswith("ARITY"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit() or pending:
                raise AssemblyError("malformed ARITY header", lineno)
            arity = int(parts[1])
            continue
        if ":" in line:
            name, line = line.split(":", 1)
            name, line = name.strip(), line.strip()
            if not _LABEL_RE.match(name):
                raise AssemblyError(f"bad label {name!r}", lineno)
            if name in labels:
                raise AssemblyError(f"duplicate label {name!r}", lineno)
            labels[name] = len(pending)
            if not line:
                continue
        parts = line.split(None, 1)
        op = parts[0].upper()
        operands = [t.strip() for t in parts[1].split(",")] if len(parts) > 1 else []
        pending.append((lineno, op, operands))

    instructions = []
    for lineno, op, ops in pending:
        if op in ("INC", "DEC", "QUERY"):
            if len(ops) != 1:
                raise AssemblyError(f"{op} takes one register", lineno)
            instructions.append(Instruction(op, reg=_parse_reg(ops[0], lineno)))
        elif op == "JMP":
            if len(ops) != 1:
                raise AssemblyError("JMP takes one label", lineno)
            instructions.append(Instruction(op, target=_resolve(ops[0], labels, lineno)))
        elif op == "JZ":
            if len(ops) != 2:
                raise AssemblyError("JZ takes a register and a label", lineno)
            instructions.append(Instruction(op, reg=_parse_reg(ops[0], lineno),
                                            target=_resolve(ops[1], labels, lineno)))
        elif op == "HALT":
            if len(ops) != 1:
                raise AssemblyError("HALT takes one operand", lineno)
            if ops[0].isdigit():
                instructions.append(Instruction(op, value=int(ops[0])))
            else:
                instructions.append(Instruction(op, reg=_parse_reg(ops[0], lineno)))
        else:
            raise AssemblyError(f"unknown opcode {op!r}", lineno)
    for name, pos in labels.items():
        if pos >= len(instructions):
            raise AssemblyError(f"label {name!r} does not mark an instruction")
    try:
        return Program(tuple(instructions), arity)
    except AssemblyError as exc:
        raise AssemblyError(str(exc)) from None


def _resolve(name: str, labels: dict[str, int], lineno: int) -> int:
    if name not in labels:
        raise AssemblyError(f"undefined label {name!r}", lineno)
    return labels[name]


def pretty_print(p: Program) -> str:
    targets = {ins.target for ins in p.instructions if ins.target is not None}
    lines = [f"ARITY {p.arity}"]
    for i, ins in enumerate(p.instructions):
        if ins.op in ("INC", "DEC", "QUERY"):
            body = f"{ins.op} {_reg_name(ins.reg)}"
        elif ins.op == "JMP":
            body = f"JMP L{ins.target}"
        elif ins.op == "JZ":
            body = f"JZ {_reg_name(ins.reg)}, L{ins.target}"
        else:
            body = "HALT " + (str(ins.value) if ins.value is not None else _reg_name(ins.reg))
        lines.append(f"L{i}: {body}" if i in targets else body)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Goedel numbering
#
# Instruction codes are a bijection with the naturals: 36 register-only
# forms first (INC, DEC, QUERY, HALT-register over 9 registers), then eleven
# infinite families interleaved (JMP t, JZ r t for 9 registers, HALT n).

_FINITE_OPS = ("INC", "DEC", "QUERY", "HALT")
_N_FINITE = len(_FINITE_OPS) * NUM_REGISTERS
_N_FAMILIES = 2 + NUM_REGISTERS


def encode_instruction(ins: Instruction) -> int:
    if ins.op in ("INC", "DEC", "QUERY") or (ins.op == "HALT" and ins.reg is not None):
        return _FINITE_OPS.index(ins.op) * NUM_REGISTERS + ins.reg
    if ins.op == "JMP":
        fam, arg = 0, ins.target
    elif ins.op == "JZ":
        fam, arg = 1 + ins.reg, ins.target
    else:
        fam, arg = _N_FAMILIES - 1, ins.value
    return _N_FINITE + fam + _N_FAMILIES * arg


def decode_instruction(code: int) -> Instruction:
    if code < _N_FINITE:
        op = _FINITE_OPS[code // NUM_REGISTERS]
        return Instruction(op, reg=code % NUM_REGISTERS)
    fam, arg = (code - _N_FINITE) % _N_FAMILIES, (code - _N_FINITE) // _N_FAMILIES
    if fam == 0:
        return Instruction("JMP", target=arg)
    if fam == _N_FAMILIES - 1:
        return Instruction("HALT", value=arg)
    return Instruction("JZ", reg=fam - 1, target=arg)


DIVERGER = Program((Instruction("JMP", target=0),), arity=1)


def encode(p: Program) -> int:
    return 1 + pair(p.arity, encode_sequence(encode_instruction(i) for i in p.instructions))


def decode(n: int) -> Program:
    """Total inverse of :func:`encode`; codes outside its image give ``DIVERGER``."""
    if n <= 0:
        return DIVERGER
    arity, body = unpair(n - 1)
    if arity > NUM_GENERAL:
        return DIVERGER
    codes = decode_sequence(body)
    if codes is None:
        return DIVERGER
    instructions = tuple(decode_instruction(c) for c in codes)
    try:
        return Program(instructions, arity)
    except AssemblyError:
        return DIVERGER


# --------------------------------------------------------------------------
# execution


@dataclass(frozen=True)
class Halted:
    value: int
    steps: int
    use: int

    status = "halts"


@dataclass(frozen=True)
class StillRunning:
    steps: int
    use: int = 0

    status = "unknown"


@dataclass(frozen=True)
class LoopCertificate:
    """Configurations at ``first`` and ``second`` steps coincide."""
    first: int
    second: int
    configuration: tuple
    register_bound: int


@dataclass(frozen=True)
class Diverges:
    certificate: LoopCertificate

    status = "diverges"


RunResult = Union[Halted, StillRunning, Diverges]

_OPS = {"INC": 0, "DEC": 1, "JZ": 2, "JMP": 3, "QUERY": 4, "HALT": 5}


def _compile(p: Program):
    out = []
    for ins in p.instructions:
        if ins.op == "HALT":
            out.append((5, ins.reg, ins.value))
        else:
            out.append((_OPS[ins.op], ins.reg, ins.target))
    return out


def _initial_registers(p: Program, args) -> list[int]:
    args = list(args)
    if len(args) > NUM_GENERAL:
        raise ValueError("too many arguments")
    if any(a < 0 for a in args):
        raise ValueError("arguments must be naturals")
    regs = [0] * NUM_REGISTERS
    regs[: len(args)] = args
    return regs


def _step_loop(code, regs, oracle, budget, pc=0, steps=0, watch=None):
    """Core interpreter.  Returns (kind, pc, steps, value, max_query)."""
    n = len(code)
    max_q = -1
    while True:
        if pc >= n:
            return "halt", pc, steps, 0, max_q
        if steps >= budget:
            return "budget", pc, steps, None, max_q
        op, a, b = code[pc]
        steps += 1
        if op == 0:
            regs[a] += 1
            pc += 1
        elif op == 1:
            if regs[a]:
                regs[a] -= 1
            pc += 1
        elif op == 2:
            pc = b if regs[a] == 0 else pc + 1
        elif op == 3:
            pc = b
        elif op == 4:
            x = regs[a]
            if x > max_q:
                max_q = x
            regs[FLAG] = 1 if oracle(x) else 0
            pc += 1
        else:
            return "halt", pc, steps, (b if a is None else regs[a]), max_q
        if watch is not None and watch(pc, regs, steps):
            return "watch", pc, steps, None, max_q


def run(p: Program, args: Iterable[int], oracle: Oracle, budget: int, *,
        check_arity: bool = True) -> Halted | StillRunning:
    """Run ``p`` for at most ``budget`` steps."""
    args = list(args)
    if check_arity and len(args) != p.arity:
        raise ValueError(f"program has arity {p.arity}, got {len(args)} arguments")
    if budget < 0:
        raise ValueError("budget must be >= 0")
    regs = _initial_registers(p, args)
    kind, _, steps, value, max_q = _step_loop(_compile(p), regs, oracle, budget)
    if kind == "halt":
        return Halted(value, steps, max_q + 1)
    return StillRunning(steps, max_q + 1)


def configuration_at(p: Program, args, oracle: Oracle, step: int) -> tuple | None:
    """Machine configuration (pc, registers) after ``step`` steps, or None if halted earlier."""
    regs = _initial_registers(p, args)
    kind, pc, steps, _, _ = _step_loop(_compile(p), regs, oracle, step)
    if kind == "halt":
        return None
    return (pc, tuple(regs))


def decide_program(p: Program, args, oracle: Oracle, cap: int) -> RunResult:
    """Halted within ``cap``, certified divergence by a repeated configuration, or StillRunning.

    Uses Brent's cycle detection, so a loop is found within about twice the
    length of the pre-period plus the period.
    """
    code = _compile(p)
    regs = _initial_registers(p, args)
    state = {"saved": None, "saved_step": 0, "power": 1, "hit": None, "bound": max(regs)}

    def watch(pc, regs, steps):
        m = max(regs)
        if m > state["bound"]:
            state["bound"] = m
        config = (pc, tuple(regs))
        if config == state["saved"]:
            state["hit"] = (state["saved_step"], steps, config)
            return True
        if steps - state["saved_step"] >= state["power"]:
            state["saved"], state["saved_step"] = config, steps
            state["power"] *= 2
        return False

    # step 0 configuration seeds the detector
    state["saved"] = (0, tuple(regs))
    kind, _, steps, value, max_q = _step_loop(code, regs, oracle, cap, watch=watch)
    if kind == "halt":
        return Halted(value, steps, max_q + 1)
    if kind == "watch":
        first, second, config = state["hit"]
        return Diverges(LoopCertificate(first, second, config, state["bound"] + 1))
    return StillRunning(steps, max_q + 1)


def decide_halting(e: int, oracle: Oracle, cap: int, arg: int | None = None) -> RunResult:
    """Decide whether program ``e`` halts on ``arg`` (default: on ``e``) within ``cap``."""
    return decide_program(decode(e), [e if arg is None else arg], oracle, cap)


def validate_loop_certificate(p: Program, args, oracle: Oracle, cert: LoopCertificate) -> bool:
    a = configuration_at(p, args, oracle, cert.first)
    b = configuration_at(p, args, oracle, cert.second)
    return (a is not None and a == b == cert.configuration and cert.first < cert.second
            and max(a[1]) < cert.register_bound)


def run_index(e: int, x: int, oracle: Oracle, budget: int) -> Halted | StillRunning:
    """``Phi_e(x)`` at stage ``budget``: the input goes to r0 whatever the declared arity."""
    return run(decode(e), [x], oracle, budget, check_arity=False)


# --------------------------------------------------------------------------
# program construction


class Assembler:
    """Builds programs from labelled instructions; used by the program transformers."""

    def __init__(self):
        self.code: list[tuple] = []
        self.labels: dict[str, int] = {}
        self._fresh = 0

    def fresh(self, stem: str = "L") -> str:
        self._fresh += 1
        return f"_{stem}{self._fresh}"

    def label(self, name: str) -> None:
        if name in self.labels:
            raise ValueError(f"duplicate label {name}")
        self.labels[name] = len(self.code)

    def emit(self, op: str, reg: int | None = None, target: str | None = None,
             value: int | None = None) -> None:
        self.code.append((op, reg, target, value))

    def clear(self, r: int) -> None:
        top, done = self.fresh("clr"), self.fresh("clrd")
        self.label(top)
        self.emit("JZ", r, done)
        self.emit("DEC", r)
        self.emit("JMP", target=top)
        self.label(done)

    def set_const(self, r: int, n: int) -> None:
        self.clear(r)
        for _ in range(n):
            self.emit("INC", r)

    def move(self, src: int, *dsts: int) -> None:
        """Add ``src`` into every register in ``dsts`` and zero ``src``."""
        top, done = self.fresh("mv"), self.fresh("mvd")
        self.label(top)
        self.emit("JZ", src, done)
        self.emit("DEC", src)
        for d in dsts:
            self.emit("INC", d)
        self.emit("JMP", target=top)
        self.label(done)

    def copy(self, src: int, dst: int, tmp: int) -> None:
        """``dst := src`` preserving ``src``; ``tmp`` must be zero and is left zero."""
        self.clear(dst)
        self.move(src, dst, tmp)
        self.move(tmp, src)

    def inline(self, callee: Program, regmap: dict[int, int], exit_label: str,
               result: int | None = None) -> None:
        """Splice ``callee`` in; on halt its value goes to ``result`` and control to ``exit_label``.

        The caller must zero the callee's registers and load its inputs first.
        """
        base = {i: self.fresh("in") for i in range(len(callee))}
        halt_stub = {}
        for i, ins in enumerate(callee.instructions):
            self.label(base[i])
            r = None if ins.reg is None else regmap[ins.reg]
            if ins.op == "HALT":
                stub = self.fresh("hs")
                halt_stub[stub] = (r, ins.value)
                self.emit("JMP", target=stub)
            elif ins.op in ("JZ", "JMP"):
                self.emit(ins.op, r, base[ins.target])
            else:
                self.emit(ins.op, r)
        fall = self.fresh("hs")
        halt_stub[fall] = (None, 0)
        self.emit("JMP", target=fall)
        for stub, (r, value) in halt_stub.items():
            self.label(stub)
            if result is not None:
                if r is None:
                    self.set_const(result, value)
                elif r != result:
                    self.clear(result)
                    self.move(r, result)
            self.emit("JMP", target=exit_label)

    def build(self, arity: int) -> Program:
        if any(pos >= len(self.code) for pos in self.labels.values()):
            self.emit("HALT", value=0)
        out = []
        for op, reg, target, value in self.code:
            if target is not None:
                if target not in self.labels:
                    raise AssemblyError(f"undefined label {target!r}")
                out.append(Instruction(op, reg=reg, target=self.labels[target]))
            else:
                out.append(Instruction(op, reg=reg, value=value))
        return Program(tuple(out), arity)


def specialize(p: Program, fixed: Iterable[tuple[int, int]]) -> Program:
    """Fix some input positions of ``p`` to constants (s-m-n).

    The remaining inputs keep their order.  Registers are renamed so the
    remaining inputs land in r0.., and the fixed ones are loaded by ``INC``
    prefixes, so the step overhead is the sum of the fixed values.
    """
    fixed = dict(fixed)
    for pos, value in fixed.items():
        if not 0 <= pos < p.arity:
            raise ValueError(f"position {pos} out of range for arity {p.arity}")
        if value < 0:
            raise ValueError("fixed values must be naturals")
    remaining = [i for i in range(p.arity) if i not in fixed]
    others = [r for r in range(NUM_GENERAL) if r not in remaining]
    new_order = remaining + others
    rename = {old: new for new, old in enumerate(new_order)}
    rename[FLAG] = FLAG
    prefix = []
    for pos in sorted(fixed):
        prefix += [Instruction("INC", reg=rename[pos])] * fixed[pos]
    shift = len(prefix)
    body = []
    for ins in p.instructions:
        body.append(Instruction(
            ins.op,
            reg=None if ins.reg is None else rename[ins.reg],
            target=None if ins.target is None else ins.target + shift,
            value=ins.value,
        ))
    return Program(tuple(prefix + body), len(remaining))
