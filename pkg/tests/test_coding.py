import pytest
from hypothesis import given, strategies as st

from cohlab import catalog, runner, vm
from cohlab.constructions.coding import regularize, spector_code
from cohlab.pairing import pair, untriple
from cohlab.sets import EMPTY, TableOracle
from cohlab.verify import check_spector, decode_regular


def test_regularize_frozen():
    c = TableOracle({1: 1, 3: 1})
    r = regularize(c, [(0, 2), (1, 2), (3, 5)])
    assert r.triples == [(0, 2, 0), (1, 2, 1), (3, 5, 1)]
    assert [untriple(x) for x in r.codes] == r.triples


def test_anchors_must_increase():
    with pytest.raises(ValueError):
        regularize(EMPTY, [(2, 2), (0, 1)])


@given(st.lists(st.integers(0, 1), min_size=1, max_size=24), st.integers(0, 2**16))
def test_decode_identity(bits, seed):
    import random
    rng = random.Random(seed)
    anchors, key = [], -1
    for a in range(len(bits)):
        s = rng.randint(0, 6)
        while pair(a, s) <= key:
            s += 1
        anchors.append((a, s))
        key = pair(a, s)
    c = TableOracle.from_bits(bits)
    assert decode_regular(regularize(c, anchors).codes) == dict(enumerate(bits))


def test_spector_frozen():
    doc = catalog.by_name("spector", "evens-then-empty")
    payload, _ = runner.construct(doc)
    assert payload["q"] == [0, 8]
    assert payload["thresholds"] == {str(y): int(y == 8) for y in range(9)}
    st2 = payload["log"][1]
    assert (st2["delta"], st2["convergent"]) == ([36, 55], [0, 4, 7])


def test_spector_rows_without_programs():
    evens = TableOracle({x: 1 for x in range(0, 64, 2)})
    res = spector_code([evens], [0], width=16, ext_size=0, cap=200)
    assert res.row(0) == [1, 0] * 8
    assert res.thresholds == {0: 0}
    cert = check_spector(res.to_json(), [evens], 0, 200, vm.decode)
    assert cert.valid, cert.reason


def test_spector_q_must_start_at_zero():
    with pytest.raises(ValueError):
        spector_code([EMPTY], [1])
