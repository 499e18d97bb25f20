import pytest

from cohlab import catalog, vm
from cohlab.errors import Unstable
from cohlab.sets import (EMPTY, ApproxSet, JoinOracle, JumpOracle, Sigma2Descriptor, TableOracle,
                         oracle_from_json, post_reduce)

GE = catalog._ge(0)


def test_table_and_join():
    a = TableOracle.from_bits([1, 0, 1])
    b = TableOracle({1: 1})
    j = JoinOracle(a, b)
    assert j.prefix(6) == [1, 0, 0, 1, 1, 0]
    assert oracle_from_json(j.to_json()).prefix(6) == j.prefix(6)


def test_jump_oracle():
    jump = JumpOracle(EMPTY, 200)
    assert jump.member_program(vm.DIVERGER, 0) == 0
    assert jump.member_program(vm.parse_program("ARITY 1\nHALT 0\n"), 0) == 1


def test_limit_with_and_without_modulus():
    flips = ApproxSet(lambda x, s: s >= x, lambda x: x)
    assert [flips.limit(x, 10) for x in range(4)] == [1, 1, 1, 1]
    with pytest.raises(Unstable):
        flips.limit(20, 10)
    parity = ApproxSet(lambda x, s: s % 2)
    with pytest.raises(Unstable):
        parity.limit(0, 50)
    assert ApproxSet(lambda x, s: s > 7).limit(0, 30) == 1


def test_check_modulus_finds_late_change():
    late = ApproxSet(lambda x, s: s >= 9, lambda x: 3)
    assert late.check_modulus([0], 12) == [(0, 9), (0, 10), (0, 11)]


def test_descriptor_holds():
    phi = Sigma2Descriptor(GE, 16, 12, 4)
    # exists y1 < 12 with y1 >= x
    assert [int(phi.holds(x)) for x in range(16)] == [1] * 12 + [0] * 4


@pytest.mark.parametrize("template,ranges,expected", [
    (catalog._ge(0), (12, 4), "1111111111110000"),
    (catalog._eq2(1), (8, 2), "0101010101010101"),
    (catalog._ne(4), (2, 8), "1111000000001111"),
])
def test_post_reduction_frozen(template, ranges, expected):
    phi = Sigma2Descriptor(template, 16, *ranges)
    red = post_reduce(phi)
    jump = JumpOracle(EMPTY, 50_000)
    got = "".join(str(int(red.evaluate(x, jump))) for x in range(16))
    assert got == expected
    assert got == "".join(str(int(phi.holds(x))) for x in range(16))
