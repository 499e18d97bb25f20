from hypothesis import given, strategies as st

from cohlab.pairing import decode_sequence, encode_sequence, pair, triple, unpair, untriple


def test_small_values():
    assert [pair(x, y) for x, y in [(0, 0), (1, 0), (0, 1), (3, 3), (0, 8)]] == [0, 2, 1, 24, 36]
    assert encode_sequence([0, 1, 2]) == 211
    assert decode_sequence(211) == [0, 1, 2]
    assert decode_sequence(0) is None


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_pair_roundtrip(x, y):
    assert unpair(pair(x, y)) == (x, y)


@given(st.integers(0, 10**5))
def test_unpair_onto(n):
    assert pair(*unpair(n)) == n


@given(st.integers(0, 500), st.integers(0, 500), st.integers(0, 500))
def test_triple_roundtrip(a, b, c):
    assert untriple(triple(a, b, c)) == (a, b, c)


@given(st.lists(st.integers(0, 1000), max_size=12))
def test_sequence_roundtrip(items):
    assert decode_sequence(encode_sequence(items)) == items
