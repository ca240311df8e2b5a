import pytest

from dga import fixtures as fx
from dga import transforms as tf
from dga.automaton import Automaton, Variant, classify, validate
from dga.errors import AlphabetMismatchError, ContractError, InvalidInputError
from dga.games import accepts
from dga.graphs import enumerate_graphs, is_connected

from _util import graphs, universe

AUTOMATA = fx.AUTOMATON_FIXTURES


def _language(a, gs):
    return [accepts(a, g) for g in gs]


def _same_language(a, b, n=2):
    gs = list(enumerate_graphs(n, a.sigma, a.gamma))
    return _language(a, gs) == _language(b, gs)


# nonblocking -----------------------------------------------------------------------------


def _blocking():
    """Blocks on every node without incoming neighbours."""
    return Automaton.build(["_"], ["_"], [("s", "E"), ("yes", "P")], {"_": "s"},
                           [("s", "card >= 1", ["yes"])], [["yes"]])


def test_nonblocking_report():
    rep = tf.is_nonblocking(_blocking())
    assert not rep.nonblocking and rep.witness[0].n == 1
    assert tf.is_nonblocking(fx.build("A_3color")).nonblocking
    assert tf.syntactically_complete(fx.build("A_3color"))
    b, r = tf.make_nonblocking(_blocking())
    assert tf.is_nonblocking(b).nonblocking
    assert r.output_size <= r.input_sizes[0] + r.input_lengths[0]
    assert r.output_length == r.input_lengths[0]
    assert _same_language(b, _blocking(), 3)


@pytest.mark.parametrize("name", AUTOMATA)
def test_nonblocking_bound(name):
    a = fx.build(name)
    b, r = tf.make_nonblocking(a)
    assert validate(b).ok
    assert r.output_size <= a.size + a.length and r.output_length == a.length
    assert tf.syntactically_complete(b) is not False


# trim and ANF ----------------------------------------------------------------------------


def test_trim_removes_orphan():
    a = fx.build("A_3color")
    data = Automaton.build(["_"], ["_"], [("ini", "E"), ("lost", "E"), ("yes", "P"), ("no", "P")],
                           {"_": "ini"}, [("ini", "true", ["yes"]), ("lost", "true", ["no"])], [["yes"]])
    t, _ = tf.trim(data)
    assert "lost" not in t.state_names
    t2, _ = tf.trim(a)
    assert t2.size == a.size


def test_anf_inserts_copy_level():
    two_e = Automaton.build(["_"], ["_"], [("s", "E"), ("t", "E"), ("yes", "P")], {"_": "s"},
                            [("s", "true", ["t"]), ("t", "true", ["yes"])], [["yes"]])
    assert not tf.is_anf(two_e)
    b, rep = tf.to_anf(two_e)
    assert tf.is_anf(b) and b.length == 3
    assert b.level_kinds()[1].value == "A"
    assert _same_language(b, two_e, 3)
    same, _ = tf.to_anf(fx.build("A_centric"))
    assert same.size == 10


@pytest.mark.parametrize("name", AUTOMATA)
def test_anf_bounds(name):
    a = fx.build(name)
    b, r = tf.to_anf(a)
    assert tf.is_anf(b)
    assert b.size < 2 * a.size and b.length < 2 * a.length


# dual and complement ---------------------------------------------------------------------


def test_dual_of_3color_is_not3color():
    d, _ = tf.dual(fx.build("A_3color"))
    assert _same_language(d, fx.build("A_not3color"), 3)


@pytest.mark.parametrize("name", AUTOMATA)
def test_dual_is_involution(name):
    a = fx.build(name)
    dd, _ = tf.dual(tf.dual(a)[0])
    assert [s.kind for s in dd.states] == [s.kind for s in a.states]
    for f in [frozenset([q]) for q in a.permanent] + [a.permanent]:
        assert dd.accepts_set(f) == a.accepts_set(f)


def test_complement_ddga():
    a = fx.build("A_occur_abc")
    c, rep = tf.complement_ddga(a)
    assert rep.output_size == a.size
    gs = graphs(3, ("a", "b", "c"))
    d, _ = tf.dual(a)
    cc, _ = tf.complement_ddga(c)
    for g in gs:
        assert accepts(c, g) == (set(g.labels) != {"a", "b", "c"})
        assert accepts(c, g) == accepts(d, g)
        assert accepts(cc, g) == accepts(a, g)
    with pytest.raises(ContractError):
        tf.complement_ddga(fx.build("A_3color"))


# union, intersection, projection ---------------------------------------------------------


def test_union_of_max2_and_min3_is_everything():
    u, rep = tf.union(fx.build("A_max2"), fx.build("A_min3"))
    assert tf.closure_law(rep)
    assert all(accepts(u, g) for g in graphs(4))


def test_intersection_with_connectivity():
    core = fx.build("A_tree")
    i, rep = tf.intersection(fx.build("A_conn"), core)
    assert tf.closure_law(rep)
    for g in graphs(3):
        assert accepts(i, g) == (is_connected(g) and accepts(core, g))
    assert all(accepts(i, g) == fx.directed_tree(g) for g in universe("A_tree", 3))


def test_intersection_with_universal_language():
    everything = Automaton.build(["_"], ["_"], [("yes", "P")], {"_": "yes"}, [], [["yes"]])
    a = fx.build("A_3color")
    i, _ = tf.intersection(a, everything)
    assert _same_language(i, a, 3)


def test_mismatched_alphabets():
    with pytest.raises(AlphabetMismatchError):
        tf.union(fx.build("A_3color"), fx.build("A_occur_abc"))


def test_projection_examples():
    a = fx.build("A_occur_abc")
    p, rep = tf.project(a, {"a": "_", "b": "_", "c": "_"})
    assert tf.closure_law(rep)
    assert rep.output_length == a.length + 1
    for g in graphs(4):
        assert accepts(p, g) == (g.n >= 3)
    ident, _ = tf.project(fx.build("A_3color"), {"_": "_"})
    assert _same_language(ident, fx.build("A_3color"), 3)
    with pytest.raises(InvalidInputError):
        tf.project(a, {"a": "_"})


def test_extend_alphabet():
    a = fx.build("A_occur_abc")
    b, _ = tf.extend_alphabet(a, {"a": "a", "b": "b", "c": "c", "d": "a"})
    for g in graphs(2, ("a", "b", "c")):
        g2 = type(g)(b.sigma, g.gamma, g.labels, g.edges)
        assert accepts(b, g2) == accepts(a, g)
    same, _ = tf.extend_alphabet(a, {x: x for x in a.sigma})
    assert _same_language(same, a, 2)


# products --------------------------------------------------------------------------------


def test_product_examples():
    a = fx.build("A_occur_abc")
    c, _ = tf.complement_ddga(a)
    p, rep = tf.product(a, c, "and")
    assert tf.closure_law(rep)
    assert classify(p) is Variant.DDGA
    assert not any(accepts(p, g) for g in graphs(3, ("a", "b", "c")))
    m = fx.build("A_min3")
    mm, _ = tf.product(m, m, "and")
    assert _same_language(mm, m, 4)
    o, _ = tf.product(fx.build("A_min3"), fx.build("A_3color"), "or")
    gs = graphs(3)
    assert [accepts(o, g) for g in gs] == [g.n >= 3 or fx.three_colorable(g) for g in gs]
    with pytest.raises(ContractError):
        tf.product(fx.build("A_not3color"), m, "and")


def test_report_json():
    _, rep = tf.union(fx.build("A_max2"), fx.build("A_min3"))
    js = rep.to_json()
    assert js["construction"] == "union" and js["steps"]
