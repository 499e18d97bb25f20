import pytest

from cohlab import catalog
from cohlab.documents import descriptor, family_from_doc, tree_from_doc
from cohlab.errors import NotCohesive, SearchExhausted
from cohlab.constructions.cohesive import (cohesive_from_path, path_approximation, run_triangle,
                                           separation_approximation, separator_from_cohesive,
                                           sigma2_from_tree)
from cohlab.sets import ApproxSet
from cohlab.trees import TruncatedTree, string_code
from cohlab.verify import check_cohesive, check_least_s, tree_growth_sets

BITS3 = family_from_doc({"kind": "bits", "count": 3})


def test_least_s_elements_frozen():
    out = cohesive_from_path(BITS3, path_approximation("101"), 8, 1000)
    assert out.elements == (0, 1, 5, 13, 21, 29, 37, 45)
    assert [r.constraints for r in out.log[:3]] == [(), ((0, 1),), ((0, 1), (1, 0))]
    assert check_cohesive(out.elements, BITS3).valid
    assert check_least_s(out.elements, BITS3, path_approximation("101")).valid


def test_mod_family():
    fam = family_from_doc({"kind": "mod", "moduli": [2, 3], "residues": [0, 0]})
    out = cohesive_from_path(fam, path_approximation("10"), 6, 1000)
    # from stage 2 on: even and not divisible by 3
    assert out.elements == (0, 2, 4, 8, 10, 14)


def test_search_exhausted():
    with pytest.raises(SearchExhausted):
        cohesive_from_path(BITS3, path_approximation("111"), 10, 40)


def test_check_cohesive_rejects_shift():
    out = cohesive_from_path(BITS3, path_approximation("000"), 32, 1000)
    bad = list(out.elements)
    bad[-5:] = [x + 1 for x in bad[-5:]]
    assert not check_cohesive(bad, BITS3).valid


def test_separation_approximation_settles():
    evens = descriptor(catalog.separator_instances()[0]["payload"]["a0"])
    odds = descriptor(catalog.separator_instances()[0]["payload"]["a1"])
    f = separation_approximation(evens, odds)
    late = f.settle + 2
    assert [f.at(x, late) for x in range(8)] == [1, 0, 1, 0, 1, 0, 1, 0]
    assert [f.at(0, s) for s in range(4)] == [0, 1, 0, 1]


def test_separator_needs_cohesive_input():
    f = ApproxSet(lambda x, s: s % 2)
    with pytest.raises(NotCohesive):
        separator_from_cohesive(f, (0, 1, 2, 3, 4, 5, 6, 7), 1, min_tail=4)


def test_sigma2_from_tree_matches_growth_sets():
    t = TruncatedTree.from_json(catalog.staged_tree(5))
    a0, a1 = sigma2_from_tree(t)
    left, right = tree_growth_sets(t)
    for sigma in sorted(left | right):
        x = string_code(sigma)
        assert a0.holds(x) == (sigma in left)
        assert a1.holds(x) == (sigma in right)


def test_triangle_frozen():
    t = tree_from_doc(catalog.by_name("triangle", "staged-3")["payload"]["tree"])
    run = run_triangle(t)
    assert run.path.chain[-1] == "000011"
    assert run.cohesive.elements[:8] == (0, 2, 4, 6, 8, 10, 12, 14)
    final = t.stage(t.num_stages - 1)
    assert final.contains(run.path.chain[-1])
