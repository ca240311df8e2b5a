import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dga import fixtures as fx
from dga.errors import InvalidInputError, SyntaxErrorAt
from dga.games import accepts
from dga.graphs import LabeledGraph, complete_graph, edgeless_graph, enumerate_graphs
from dga.mso import (And, Assignment, Edge, Eq, ExistsNode, ExistsSet, ForallNode, ForallSet, Implies, In,
                     Lab, Not, Or, automaton_to_sentence, compile_formula, decode_assignment,
                     encode_assignment, evaluate, exactly_one, free_vars, is_sentence, parse,
                     phi_3color, phi_centric, render)
from dga.mso.semantics import pair_alphabet, pair_label
from dga.mso.syntax import check_well_formed

from _util import graphs

# syntax ----------------------------------------------------------------------------------


def test_parse_examples():
    assert parse("exists u (lab[a](u))") == ExistsNode("u", Lab("a", "u"))
    f = parse("!lab[a](x) & lab[b](y) | x = y => x -> y")
    assert isinstance(f, Implies)
    assert isinstance(f.left, Or)
    assert isinstance(f.left.args[0], And) and isinstance(f.left.args[0].args[0], Not)
    assert parse("x ->[g] y") == Edge("x", "g", "y")
    assert parse("forall X (x in X)") == ForallSet("X", In("x", "X"))
    assert parse("exists x, y (x = y)") == ExistsNode("x", ExistsNode("y", Eq("x", "y")))


def test_parse_errors():
    for bad in ["exists (x)", "lab[a](", "x ->", "x in y", "exists X (X = x)", "lab[](x)"]:
        with pytest.raises((SyntaxErrorAt, InvalidInputError)):
            check_well_formed(parse(bad))


def test_free_variables():
    assert free_vars(parse("x in X")) == {"x", "X"}
    assert free_vars(parse("exists x (x = y)")) == {"y"}
    assert is_sentence(phi_centric()) and free_vars(phi_centric()) == frozenset()


def test_round_trip_of_benchmarks():
    for f in (phi_3color(), phi_centric()):
        assert parse(render(f)) == f


node_vars = st.sampled_from(["x", "y"])
set_vars = st.sampled_from(["X", "Y"])
mso_atoms = st.one_of(
    st.builds(Lab, st.sampled_from(["a", "b"]), node_vars),
    st.builds(lambda u, v: Edge(u, None, v), node_vars, node_vars),
    st.builds(Eq, node_vars, node_vars),
    st.builds(In, node_vars, set_vars),
)
formulas = st.recursive(mso_atoms, lambda inner: st.one_of(
    st.builds(Not, inner),
    st.builds(lambda a, b: And((a, b)), inner, inner),
    st.builds(lambda a, b: Or((a, b)), inner, inner),
    st.builds(Implies, inner, inner),
    st.builds(ExistsNode, node_vars, inner),
    st.builds(ForallNode, node_vars, inner),
    st.builds(ExistsSet, set_vars, inner),
    st.builds(ForallSet, set_vars, inner),
), max_leaves=5)

SMALL = [g for g in enumerate_graphs(2, ["a", "b"])]


def _closed(f):
    for x in sorted(free_vars(f)):
        f = ExistsNode(x, f) if x.islower() else ExistsSet(x, f)
    return f


@settings(max_examples=150, deadline=None)
@given(formulas)
def test_render_parse_identity(f):
    assert parse(render(f)) == f


@settings(max_examples=80, deadline=None)
@given(formulas, st.sampled_from(["X", "x"]))
def test_quantifier_duality(f, var):
    f = _closed(f)
    if var == "X":
        a, b = ForallSet("X", f), Not(ExistsSet("X", Not(f)))
    else:
        a, b = ForallNode("x", f), Not(ExistsNode("x", Not(f)))
    for g in SMALL:
        assert evaluate(a, g) == evaluate(b, g)


# semantics -------------------------------------------------------------------------------


def test_evaluation_examples():
    assert evaluate(phi_3color(), complete_graph(3))
    assert not evaluate(phi_3color(), LabeledGraph.build(["_"], [(0, 0)]))
    for g in graphs(2):
        assert evaluate(parse("forall u (u = u)"), g)
    g = LabeledGraph.build(["a", "b"], [(0, 1)])
    assert evaluate(parse("x -> y & lab[a](x)"), g, {"x": 0, "y": 1})
    assert not evaluate(parse("x in X"), g, {"x": 0, "X": [1]})
    with pytest.raises(InvalidInputError):
        evaluate(parse("x = x"), g)


def test_evaluation_matches_oracles():
    for g in graphs(3):
        assert evaluate(phi_3color(), g) == fx.three_colorable(g)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.data())
def test_centric_sentence_matches_oracle(n, data):
    labels = data.draw(st.lists(st.sampled_from("abc"), min_size=n, max_size=n))
    pairs = [(u, v) for u in range(n) for v in range(n)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True))
    g = LabeledGraph.build(labels, edges, sigma=["a", "b", "c"])
    assert evaluate(phi_centric(), g) == fx.centric(g)


def test_centric_example_graphs():
    assert evaluate(phi_centric(), fx.build("G_centric_in"))
    assert not evaluate(phi_centric(), fx.build("G_centric_out"))


def test_encoding_examples():
    g = LabeledGraph.build(["a", "b", "a"], [(0, 1)])
    plain = encode_assignment(g, {}, [])
    assert plain.labels == g.labels
    enc = encode_assignment(g, {"x": 0, "X": [0, 1]})
    assert enc.labels == (pair_label("a", ["x", "X"]), pair_label("b", ["X"]), "a")
    back, alpha = decode_assignment(enc)
    assert back.labels == g.labels and back.edges == g.edges
    assert alpha == Assignment({"x": 0}, {"X": frozenset({0, 1})})


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.data())
def test_encoding_round_trip(n, data):
    g = edgeless_graph(n)
    alpha = {"x": data.draw(st.integers(0, n - 1)), "X": data.draw(st.sets(st.integers(0, n - 1)))}
    _, back = decode_assignment(encode_assignment(g, alpha))
    assert back == Assignment.of(alpha)


# compilation -----------------------------------------------------------------------------


def test_label_atom():
    a, _ = compile_formula("lab[a](x)", ["a", "b"], ["_"])
    sig = pair_alphabet(["a", "b"], ["x"])
    yes = LabeledGraph.build([pair_label("a", ["x"])], [], sigma=sig.symbols)
    no = LabeledGraph.build([pair_label("b", ["x"])], [], sigma=sig.symbols)
    assert accepts(a, yes) and not accepts(a, no)


def test_exactly_one():
    a = exactly_one("x", ["x"], ["_"], ["_"])
    sig = pair_alphabet(["_"], ["x"]).symbols
    marked = pair_label("_", ["x"])
    for n in range(1, 5):
        for k in range(n + 1):
            g = LabeledGraph.build([marked] * k + ["_"] * (n - k), [], sigma=sig)
            assert accepts(a, g) == (k == 1)


CASES = ["exists x (lab[a](x))", "forall x (lab[a](x))", "exists x, y (x -> y & !x = y)",
         "exists x (x -> x)", "exists X (forall x (x in X))", "forall x (lab[a](x) | exists y (y -> x))",
         "exists x (lab[a](x) & forall y (y -> x => lab[b](y)))", "exists x, y (!x = y) <=> exists z (z -> z)"]


@pytest.mark.parametrize("text", CASES)
def test_compile_agrees_with_evaluation(text):
    f = parse(text)
    a, rep = compile_formula(f, ["a", "b"], ["_"])
    assert rep.laws_hold()
    assert (rep.output_size, rep.output_length) == (a.size, a.length)
    for g in graphs(2, ("a", "b")):
        assert accepts(a, g) == evaluate(f, g), render(f)


def test_compile_with_free_variables():
    f = parse("lab[a](x) & exists y (x -> y)")
    a, _ = compile_formula(f, ["a", "b"], ["_"])
    for g in graphs(3, ("a", "b")):
        for v in range(g.n):
            assert accepts(a, encode_assignment(g, {"x": v})) == evaluate(f, g, {"x": v})


def test_compile_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        compile_formula("lab[z](x)", ["a"], ["_"])
    with pytest.raises(InvalidInputError):
        compile_formula("x -> y", ["a"], ["g", "h"])


# automaton to sentence -------------------------------------------------------------------


def test_max2_sentence():
    s = automaton_to_sentence(fx.build("A_max2"))
    assert is_sentence(s)
    for g in graphs(4):
        assert evaluate(s, g) == (g.n <= 2)


@pytest.mark.parametrize("name", ["A_min3", "A_not3color", "A_conn"])
def test_sentence_agrees_with_automaton(name):
    a = fx.build(name)
    s = automaton_to_sentence(a)
    for g in graphs(2):
        assert evaluate(s, g) == accepts(a, g)
