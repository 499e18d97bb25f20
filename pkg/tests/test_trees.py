import pytest
from hypothesis import given, settings, strategies as st

from cohlab import catalog
from cohlab.documents import tree_from_doc
from cohlab.errors import DeadEnd
from cohlab.trees import (TruncatedTree, UniformFamily, all_strings, string_code, string_from_code,
                          tree_from_family)
from cohlab.verify import tree_growth_sets


def test_string_codes():
    assert [string_code(s) for s in ["", "0", "1", "01"]] == [1, 2, 3, 5]
    assert string_from_code(5) == "01"
    assert all(string_from_code(string_code(s)) == s for s in all_strings(5))


def test_avoid_tree_leftmost():
    t = tree_from_doc({"avoid": ["00"], "depth": 6})
    assert t.leftmost_path() == "010101"
    assert t.contains("0110") and not t.contains("1001")


def test_dead_end():
    t = TruncatedTree(["", "0", "1", "00"], 3)
    with pytest.raises(DeadEnd):
        t.leftmost_viable_extension("")
    assert not t.viable()


def test_family_tree_path():
    fam = UniformFamily(lambda k, x: (x >> k) & 1, 3)
    t = tree_from_family(fam, 64)
    # every pattern has 8 witnesses below 64, so the leftmost path is all zeros
    assert t.leftmost_path() == "000"


def test_staged_tree_serializes():
    doc = catalog.staged_tree(3, 6, 4, 4)
    t = TruncatedTree.from_json(doc)
    assert t.staged and t.num_stages == len(doc["stages"])
    assert TruncatedTree.from_json(t.to_json()).materialize() == t.materialize()


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 8), st.integers(1, 8))
def test_growth_sets_disjoint(seed, garbage, flicker):
    t = TruncatedTree.from_json(catalog.staged_tree(seed, 6, garbage, flicker))
    left, right = tree_growth_sets(t)
    assert not left & right
