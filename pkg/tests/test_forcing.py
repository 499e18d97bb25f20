import pytest

from cohlab import catalog, runner
from cohlab.constructions.forcing import holds, simpson_smith_path, superlow_basis
from cohlab.documents import program, tree_from_doc
from cohlab.errors import UndecidableAtCap
from cohlab.vm import parse_program

FULL6 = tree_from_doc({"full": True, "depth": 6})


def test_holds_reads_only_the_string():
    bit0 = program(catalog.F_BIT0)
    assert holds(bit0, 0, "1", 100)
    assert not holds(bit0, 0, "0", 100)
    # querying past the string does not count as holding
    assert not holds(bit0, 0, "", 100)


def test_holds_undecidable():
    grow = parse_program("ARITY 1\ntop: INC r1\nJMP top\n")
    with pytest.raises(UndecidableAtCap):
        holds(grow, 0, "", 50)


@pytest.mark.parametrize("name,prefix,table", [
    ("full-12", "000000000000", [0, 0, 1, 0, 0, 0]),
    ("no11-12", "000100000000", [0, 0, 0, 0, 1, 0]),
    ("no1-6", "000000", [0, 1, 0]),
])
def test_superlow_frozen(name, prefix, table):
    doc = catalog.by_name("superlow", name)
    payload, _ = runner.construct(doc)
    assert payload["path_prefix"] == prefix
    assert payload["jump_table"] == table
    assert payload["table_queries"] == len(table) <= 2 ** len(table)


def test_true_formula_forces_jump_bit():
    tr = superlow_basis(FULL6, [program(catalog.F_TRUE), program(catalog.F_FALSE)])
    assert tr.jump_table == [1, 0]
    assert [d.kept_divergence for d in tr.decisions] == [False, True]


def test_simpson_smith_avoids_bit():
    # the divergence class of "bit 0 is set" is viable, so the path starts with 0
    res = simpson_smith_path(FULL6, [(program(catalog.F_BIT0), 0)])
    assert res.path_prefix == "000000"
    assert res.decisions[0].kept_divergence
