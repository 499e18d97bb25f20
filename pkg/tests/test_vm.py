import pytest

from cohlab import vm
from cohlab.sets import EMPTY, TableOracle
from cohlab.vm import (AssemblyError, Diverges, Halted, StillRunning, decide_program, decode,
                       encode, parse_program, run, specialize)

DOUBLE = """ARITY 1
top: JZ r0, end
DEC r0
INC r1
INC r1
JMP top
end: HALT r1
"""

MEMBER = "ARITY 1\nQUERY r0\nJZ flag, no\nHALT 1\nno: HALT 0\n"


def test_double():
    p = parse_program(DOUBLE)
    res = run(p, [5], EMPTY, 1000)
    assert isinstance(res, Halted)
    assert (res.value, res.steps, res.use) == (10, 27, 0)


def test_budget_runs_out():
    assert isinstance(run(parse_program(DOUBLE), [5], EMPTY, 10), StillRunning)


def test_query_and_use():
    p = parse_program(MEMBER)
    a = TableOracle({3: 1})
    assert run(p, [3], a, 10) == Halted(1, 3, 4)
    assert run(p, [4], a, 10) == Halted(0, 3, 5)


def test_goedel_roundtrip():
    p = parse_program(DOUBLE)
    assert decode(encode(p)) == p
    assert str(decode(0)).split() == ["ARITY", "1", "L0:", "JMP", "L0"]


def test_loop_certificate():
    res = decide_program(vm.DIVERGER, [0], EMPTY, 100)
    assert isinstance(res, Diverges)
    assert (res.certificate.first, res.certificate.second) == (0, 1)
    assert vm.validate_loop_certificate(vm.DIVERGER, [0], EMPTY, res.certificate)


def test_counting_loop_is_not_certified():
    # r1 grows forever; no configuration repeats
    p = parse_program("ARITY 1\ntop: INC r1\nJMP top\n")
    assert isinstance(decide_program(p, [0], EMPTY, 500), StillRunning)


def test_specialize():
    s = specialize(parse_program(DOUBLE), [(0, 3)])
    assert s.arity == 0
    assert run(s, [], EMPTY, 100).value == 6


@pytest.mark.parametrize("text", ["ARITY 1\nJMP nowhere\n", "ARITY 1\nFOO r0\n",
                                  "ARITY 1\nINC r9\n", "ARITY 1\nx: INC r0\nx: INC r0\n"])
def test_bad_assembly(text):
    with pytest.raises(AssemblyError):
        parse_program(text)
