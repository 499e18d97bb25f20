from cohlab import catalog, runner, vm
from cohlab.constructions.inversion import (completion_exists, force_convergence, friedberg_invert,
                                            lex_least_extension)
from cohlab.documents import program
from cohlab.sets import EMPTY, TableOracle
from cohlab.verify import check_inversion

# halts iff B(e) = 1, reading position 2e+1 of the join
B_AT_E = program(catalog.P_B_AT_E)


def test_lex_least_sets_only_needed_bits():
    found, capped = lex_least_extension([(3, B_AT_E)], EMPTY, "", 6, 50, 1000)
    assert (found, capped) == ("000100", False)
    assert lex_least_extension([(7, B_AT_E)], EMPTY, "", 6, 50, 1000) == (None, False)


def test_node_budget_reports_cap():
    found, capped = lex_least_extension([(3, B_AT_E)], EMPTY, "", 6, 50, 1)
    assert found is None and capped


def test_completion_respects_fixed_prefix():
    assert not completion_exists([(1, B_AT_E)], EMPTY, "00", 4, 50, [100])
    assert completion_exists([(1, B_AT_E)], EMPTY, "01", 4, 50, [100])


def test_force_convergence():
    r = force_convergence([(2, B_AT_E)], EMPTY, "0", 500, 8)
    assert r.answer == "yes" and r.witness == "001"
    assert force_convergence([(0, B_AT_E)], EMPTY, "0", 500, 8).answer == "no"
    assert force_convergence([(0, vm.DIVERGER)], EMPTY, "", 500, 8).answer == "no"


def test_frozen_prefix():
    doc = catalog.by_name("inversion", "A=empty,C=evens,standard")
    payload, _ = runner.construct(doc)
    assert payload["b_prefix"] == "01010110" + "10" * 20
    assert payload["tau"] == "1111111011110111110111111"
    assert (payload["stages"][0]["found"], payload["stages"][0]["block"]) == ("0", "1")


def test_decoded_c_matches():
    c = TableOracle({i: 1 for i in range(0, 40, 3)})
    tr = friedberg_invert(EMPTY, c, 40, cap=2000)
    assert tr.decoded_c()[:16] == c.prefix(16)
    cert = check_inversion(tr.to_json(), EMPTY, c, 16, vm.decode)
    assert cert.valid, cert.reason
