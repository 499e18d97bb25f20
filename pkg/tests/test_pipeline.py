from cohlab import catalog, documents as D, runner
from cohlab.constructions.pipeline import ideal_pipeline, realize_limit_tree
from cohlab.sets import EMPTY, oracle_from_json
from cohlab.trees import TruncatedTree


def test_limit_tree_is_last_stage():
    t = TruncatedTree.from_json(catalog.staged_tree(2))
    lim, info = realize_limit_tree(t)
    assert lim.materialize() == t.stage(t.num_stages - 1).materialize()
    assert info["nodes"] == len(lim.materialize())


def test_empty_pipeline():
    res = ideal_pipeline(EMPTY, [])
    assert res.length == 1 and "error" not in res.to_json()


def test_two_iterations_frozen():
    doc = catalog.by_name("pipeline", "two-trees")
    cert = runner.certificate(doc, "two-trees.json")
    assert cert["verdict"] == "valid"
    chain = cert["payload"]["chain"]
    assert [link["iteration"] for link in chain] == [0, 1, 2]
    # each top is the join of the previous top with the new B-prefix
    for prev, link in zip(chain, chain[1:]):
        top = oracle_from_json(link["top"])
        b = link["inversion"]["b_prefix"]
        old = oracle_from_json(prev["top"])
        assert [top(2 * i + 1) for i in range(len(b))] == [int(c) for c in b]
        assert [top(2 * i) for i in range(20)] == old.prefix(20)
    assert D.digest(cert) == D.digest(runner.certificate(doc, "two-trees.json"))
