import json

import pytest

from dga import fixtures as fx
from dga.automaton import A as UNIVERSAL, Configuration
from dga.errors import ContractError, UndecidableError
from dga.games import accepts, ndga_accepts_path
from dga.graphs import LabeledGraph, edgeless_graph, mirror
from dga.language import (EmptinessVerdict, bounded_language_equal, check_mirroring, find_merge_pair,
                          local_view, merging_bound, ndga_emptiness)
from dga.transforms import dual

from _util import universe


def test_local_views():
    a = fx.build("A_min3")
    path = ndga_accepts_path(a, edgeless_graph(1))
    assert path is None
    g = edgeless_graph(4)
    path = ndga_accepts_path(a, g)
    views = [local_view(path, v) for v in g.nodes]
    assert all(s == (frozenset(),) for w in views for _, s in w.steps)
    finals = [c for c in path[-1].states]
    same = [(v, w) for v in g.nodes for w in g.nodes if v < w and finals[v] == finals[w]]
    assert same and all(views[v] == views[w] for v, w in same)


def test_views_of_symmetric_nodes():
    a = fx.build("A_3color")
    g = LabeledGraph.build(["_"] * 3, [(0, 1), (0, 2)])
    path = [Configuration(g, ("ini",) * 3), Configuration(g, ("spade", "heart", "heart")),
            Configuration(g, ("yes", "yes", "yes"))]
    assert local_view(path, 1) == local_view(path, 2)
    assert local_view(path, 0) != local_view(path, 1)


def test_mirroring_examples():
    a = fx.build("A_min3")
    ev = check_mirroring(a, edgeless_graph(3), [0])
    assert ev.source_accepted and ev.run_accepting and ev.views_covered and ev.mirrored.n == 4
    assert accepts(a, ev.mirrored)
    ev0 = check_mirroring(a, edgeless_graph(3), [])
    assert ev0.run_accepting and ev0.mirrored.n == 3
    with pytest.raises(ContractError):
        check_mirroring(fx.build("A_not3color"), edgeless_graph(1), [0])


def test_mirroring_paper_graphs():
    a = fx.build("A_occur_abc")
    src, img = fx.build("G_mirror_source"), fx.build("G_mirror_image")
    assert accepts(a, src) and accepts(a, img)


def test_strong_mirroring_for_ddga():
    a = fx.build("A_occur_abc")
    for g in universe("A_occur_abc", 3):
        for v in g.nodes:
            assert accepts(a, g) == accepts(a, mirror(g, [v])[0])


def test_merge_examples():
    a = fx.build("A_min3")
    path = ndga_accepts_path(a, edgeless_graph(4))
    res = find_merge_pair(a, path)
    assert res is not None and res.graph.n == 3
    assert res.run.is_accepting() and accepts(a, res.graph)
    one = ndga_accepts_path(fx.build("A_3color"), edgeless_graph(1))
    assert find_merge_pair(fx.build("A_3color"), one) is None


def test_symmetric_merge_keeps_incoming_edges():
    a = fx.build("A_3color")
    g = LabeledGraph.build(["_"] * 3, [(0, 1), (0, 2)])
    path = [Configuration(g, ("ini",) * 3), Configuration(g, ("spade", "heart", "heart")),
            Configuration(g, ("yes", "yes", "yes"))]
    res = find_merge_pair(a, path, mode="sym")
    assert (res.w, res.w2) == (1, 2)
    assert res.graph.edges[0] == {(0, 1)}
    assert res.run.is_accepting()


def test_merging_bound():
    assert merging_bound(fx.build("A_min3")) == 16
    a = fx.build("A_min3")
    assert merging_bound(a, undirected=True) == (4 * 2 ** 4) ** 2


def test_emptiness_examples():
    v = ndga_emptiness(fx.build("A_min3"), cap=4)
    assert v.status == "NonEmpty" and v.witness.n == 3 and v.theoretical_bound == 16
    assert json.loads(json.dumps(v.to_json()))["witness"]["nodes"]
    with pytest.raises(UndecidableError):
        ndga_emptiness(fx.build("A_not3color"))
    with pytest.raises(ContractError):
        EmptinessVerdict("EmptyProven", 3, 16)


@pytest.mark.parametrize("name", ["A_3color", "A_min3", "A_max2", "A_occur_abc", "A_conn"])
def test_emptiness_agrees_with_sweep(name):
    a = fx.build(name)
    if a.of_kind(UNIVERSAL):
        with pytest.raises(UndecidableError):
            ndga_emptiness(a, cap=3)
        return
    v = ndga_emptiness(a, cap=3)
    any_accepted = any(accepts(a, g) for g in universe(name, 3))
    assert (v.status == "NonEmpty") == any_accepted


def test_language_comparison():
    a = fx.build("A_3color")
    assert bounded_language_equal(a, a, 2).equal
    assert bounded_language_equal(a, dual(fx.build("A_not3color"))[0], 3).equal
    res = bounded_language_equal(fx.build("A_max2"), fx.build("A_min3"), 3)
    assert not res.equal and res.counterexample.n == 1 and res.accepted_by == (True, False)
