import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dga import fixtures as fx
from dga.automaton import (A, E, P, Automaton, Configuration, ConfigurationKind, Variant,
                           automaton_from_json, automaton_to_json, classify, configuration_kind,
                           determinism_check, global_successors, initial_configuration,
                           local_successors, neighbour_sets, validate)
from dga.errors import InvalidAutomatonError, InvalidInputError
from dga.graphs import LabeledGraph, complete_graph, edgeless_graph, enumerate_graphs

AUTOMATA = fx.AUTOMATON_FIXTURES


@pytest.mark.parametrize("name", AUTOMATA)
def test_fixture_validates(name):
    a = fx.build(name)
    v = validate(a)
    assert v.ok, v.diagnostics


def test_centric_metrics():
    a = fx.build("A_centric")
    assert (a.size, a.length) == (10, 2)
    assert a.level_kinds() == [E, A]
    assert set(a.level(2)) == a.permanent


def _simple(states, rules, init=None, accepting=(("yes",),)):
    return Automaton.build(["_"], ["_"], states, init or {"_": states[0][0]}, rules, [list(s) for s in accepting])


def test_invalid_automata():
    skipped = _simple([("s", "E"), ("t", "E"), ("u", "E"), ("yes", "P")],
                      [("s", "true", ["t"]), ("t", "true", ["u"]), ("s", "true", ["u"]), ("u", "true", ["yes"])])
    assert any(d.code == "E_LEVEL_CONFLICT" for d in validate(skipped).diagnostics)
    no_perm = _simple([("s", "E")], [], accepting=())
    assert any(d.code == "E_NO_PERMANENT" for d in validate(no_perm).diagnostics)
    mixed = _simple([("s", "E"), ("t", "E"), ("u", "A"), ("yes", "P")],
                    [("s", "true", ["t", "u"]), ("t", "true", ["yes"]), ("u", "true", ["yes"])])
    assert any(d.code == "E_MIXED_LEVEL" for d in validate(mixed).diagnostics)
    with pytest.raises(InvalidAutomatonError):
        mixed.validation.raise_if_invalid()


@pytest.mark.parametrize("name,variant", [("A_3color", Variant.NDGA), ("A_not3color", Variant.ADGA),
                                          ("A_occur_abc", Variant.DDGA), ("A_min3", Variant.NDGA),
                                          ("A_centric", Variant.ADGA)])
def test_classify(name, variant):
    assert classify(fx.build(name)) is variant


def test_determinism_witness():
    det = determinism_check(fx.build("A_3color"))
    assert det.deterministic is False and det.witness[0] == "ini"
    assert determinism_check(fx.build("A_occur_abc")).deterministic is True


def test_local_transition_examples():
    a = fx.build("A_3color")
    assert local_successors(a, "yes", {"_": {"spade"}}) == {"yes"}
    assert local_successors(a, "ini", {"_": set()}) == {"spade", "heart", "club"}
    assert local_successors(a, "spade", {"_": {"spade"}}) == {"no"}
    assert local_successors(a, "spade", {"_": {"heart"}}) == {"yes"}


def test_initial_configurations():
    g = LabeledGraph.build(["a", "b", "c"], [], sigma=["a", "b", "c"])
    assert initial_configuration(fx.build("A_centric"), g).states == ("qa", "qb", "qc")
    assert len(set(initial_configuration(fx.build("A_occur_abc"), g).states)) == 3
    assert initial_configuration(fx.build("A_3color"), edgeless_graph(1)).states == ("ini",)
    with pytest.raises(InvalidInputError):
        initial_configuration(fx.build("A_3color"), g)


def test_global_successor_examples():
    a = fx.build("A_3color")
    c = initial_configuration(a, edgeless_graph(2))
    assert len(global_successors(a, c)) == 9
    nots = fx.build("A_not3color")
    for n in (1, 2, 3):
        c = initial_configuration(nots, complete_graph(n))
        assert len(global_successors(nots, c)) == 3 ** n
    perm = Configuration(edgeless_graph(2), ("yes", "no"))
    assert global_successors(a, perm) == [perm]
    assert configuration_kind(a, perm) is ConfigurationKind.PERMANENT


def _reachable(a, g, limit=400):
    seen, todo = [], [initial_configuration(a, g)]
    while todo and len(seen) < limit:
        c = todo.pop()
        if c in seen:
            continue
        seen.append(c)
        todo.extend(global_successors(a, c))
    return seen


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(AUTOMATA), st.data())
def test_successors_climb_levels_and_multiply(name, data):
    a = fx.build(name)
    e = fx.entry(name)
    gs = list(enumerate_graphs(2, e.sigma, e.gamma))
    g = data.draw(st.sampled_from(gs))
    lv = a.levels
    for c in _reachable(a, g, 60):
        succ = global_successors(a, c)
        per_node = [local_successors(a, c.states[v], neighbour_sets(a, c, v)) for v in g.nodes]
        assert len(succ) == math.prod(len(o) for o in per_node)
        assert len(set(succ)) == len(succ)
        for d in succ:
            for q, r in zip(c.states, d.states):
                assert r == q if q in a.permanent else (r in a.permanent or lv[r] == lv[q] + 1)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(AUTOMATA), st.data())
def test_permanent_states_only_loop(name, data):
    a = fx.build(name)
    q = data.draw(st.sampled_from(sorted(a.permanent)))
    s = {g: data.draw(st.frozensets(st.sampled_from(a.state_names))) for g in a.gamma}
    assert local_successors(a, q, s) == {q}


@pytest.mark.parametrize("name", AUTOMATA)
def test_json_round_trip(name):
    a = fx.build(name)
    b = automaton_from_json(automaton_to_json(a))
    assert automaton_to_json(b) == automaton_to_json(a)
    e = fx.entry(name)
    for g in enumerate_graphs(2, e.sigma, e.gamma):
        c1, c2 = initial_configuration(a, g), initial_configuration(b, g)
        assert [x.states for x in global_successors(a, c1)] == [x.states for x in global_successors(b, c2)]


def test_json_errors():
    with pytest.raises(InvalidInputError):
        automaton_from_json("{")
    with pytest.raises(InvalidInputError):
        automaton_from_json({"sigma": ["_"]})


def test_max2_family_is_small_marker_sets():
    a = fx.build("A_max2")
    markers = sorted(a.permanent)
    for k in range(1, 4):
        for s in itertools.combinations(markers, k):
            assert a.accepts_set(s) == (k <= 2)
