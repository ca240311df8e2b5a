import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dga import families as fam
from dga import guards as gd
from dga.errors import SyntaxErrorAt

STATES = ("p", "q", "r")
GAMMAS = ("x", "y")


def _subsets(xs):
    return [frozenset(c) for k in range(len(xs) + 1) for c in itertools.combinations(xs, k)]


ALL_S = [dict(zip(GAMMAS, pair)) for pair in itertools.product(_subsets(STATES), repeat=2)]
INDEX = {q: i for i, q in enumerate(STATES)}
GINDEX = {g: i for i, g in enumerate(GAMMAS)}


def _masks(s):
    return tuple(sum(1 << INDEX[q] for q in s[g]) for g in GAMMAS)


names = st.sampled_from(STATES)
gammas = st.sampled_from(GAMMAS)
state_sets = st.frozensets(names, min_size=1)
atoms = st.one_of(
    st.just(gd.TRUE),
    st.builds(gd.Member, names, gammas),
    st.builds(gd.MemberAny, gammas, state_sets),
    st.builds(gd.Equals, gammas, st.frozensets(names)),
    st.builds(gd.CardCmp, gammas, st.sampled_from(sorted(gd.COMPARATORS)), st.integers(0, 3)),
)
guards = st.recursive(atoms, lambda inner: st.one_of(
    st.builds(gd.Not, inner),
    st.builds(lambda xs: gd.And(tuple(xs)), st.lists(inner, min_size=2, max_size=3)),
    st.builds(lambda xs: gd.Or(tuple(xs)), st.lists(inner, min_size=2, max_size=3)),
), max_leaves=6)


# guards ----------------------------------------------------------------------------------


def test_guard_examples():
    assert gd.TRUE.evaluate({"_": frozenset()})
    assert gd.parse_guard("has(q_b)").evaluate({None: {"q_a", "q_b"}})
    assert not gd.parse_guard("eq({q_bk,q_bkr})").evaluate({None: {"q_a"}})
    assert gd.parse_guard("card@x >= 2").evaluate({"x": {"p", "q"}})
    assert gd.parse_guard("has{p,q}@y & !has(r)@y").evaluate({"y": {"q"}})


@settings(max_examples=150, deadline=None)
@given(guards)
def test_compiled_guard_agrees_with_evaluation(g):
    run = gd.compile_guard(g, INDEX, GINDEX)
    for s in ALL_S:
        assert run(_masks(s)) == g.evaluate(s)


@settings(max_examples=150, deadline=None)
@given(guards)
def test_render_parse_round_trip(g):
    h = gd.parse_guard(g.render())
    assert all(h.evaluate(s) == g.evaluate(s) for s in ALL_S)


@settings(max_examples=150, deadline=None)
@given(guards, st.frozensets(names))
def test_satisfiable_matches_brute_force(g, universe):
    fams = [dict(zip(GAMMAS, pair)) for pair in itertools.product(_subsets(sorted(universe)), repeat=2)]
    want = any(g.evaluate(s) for s in fams)
    got = gd.satisfiable(g, universe, GAMMAS)
    assert got is None or got == want
    v = gd.valid(g, universe, GAMMAS)
    assert v is None or v == all(g.evaluate(s) for s in fams)


@settings(max_examples=100, deadline=None)
@given(guards)
def test_connectives_simplify_soundly(g):
    for s in ALL_S:
        assert gd.neg(g).evaluate(s) == (not g.evaluate(s))
        assert gd.conj(g, gd.TRUE).evaluate(s) == g.evaluate(s)
        assert gd.disj(g, gd.FALSE).evaluate(s) == g.evaluate(s)


def test_guard_syntax_errors():
    for bad in ["has(", "card >= x", "p & ", "eq{p}", "has(p) @"]:
        with pytest.raises(SyntaxErrorAt):
            gd.parse_guard(bad)


# families --------------------------------------------------------------------------------

fam_atoms = st.one_of(
    st.just(fam.ALL),
    st.builds(fam.present, names),
    st.builds(fam.Within, st.frozensets(names)),
    st.builds(fam.card, state_sets, st.sampled_from(sorted(gd.COMPARATORS)), st.integers(0, 3)),
    st.builds(fam.explicit, st.lists(st.lists(names, min_size=1, max_size=3), max_size=3)),
)
families = st.recursive(fam_atoms, lambda inner: st.one_of(
    st.builds(fam.FNot, inner),
    st.builds(lambda xs: fam.FAnd(tuple(xs)), st.lists(inner, min_size=2, max_size=3)),
    st.builds(lambda xs: fam.FOr(tuple(xs)), st.lists(inner, min_size=2, max_size=3)),
), max_leaves=5)

SETS = _subsets(STATES)


def test_family_examples():
    f = fam.parse_family("card{m1,m2,m3} <= 2")
    assert f.accepts(frozenset({"m1", "m2"})) and not f.accepts(frozenset({"m1", "m2", "m3"}))
    assert fam.parse_family("is{a,b}").accepts(frozenset({"a", "b"}))
    assert not fam.parse_family("within{a}").accepts(frozenset({"a", "b"}))
    g = fam.parse_family("groups{{a,b},{c}} >= 2")
    assert g.accepts(frozenset({"b", "c"})) and not g.accepts(frozenset({"a", "b"}))


@settings(max_examples=150, deadline=None)
@given(families)
def test_compiled_family_and_round_trips(f):
    run = fam.compile_family(f, INDEX)
    back = fam.family_from_json(fam.family_to_json(f))
    again = fam.parse_family(f.render())
    for s in SETS:
        m = sum(1 << INDEX[q] for q in s)
        assert run(m) == f.accepts(s) == back.accepts(s) == again.accepts(s)
    assert fam.expand(f, STATES) == [s for s in sorted(SETS, key=lambda s: (len(s), sorted(s)))
                                     if s and f.accepts(s)] or isinstance(f, fam.Explicit)


@settings(max_examples=150, deadline=None)
@given(families, st.lists(st.frozensets(names, min_size=1), min_size=1, max_size=3))
def test_three_valued_family_is_sound(f, reach):
    """A definite answer must hold for every choice of one state per node."""
    run = fam.compile_family_bounds(f, INDEX)
    rs = [sum(1 << INDEX[q] for q in r) for r in reach]
    got = run(rs)
    finals = {frozenset(c) for c in itertools.product(*[sorted(r) for r in reach])}
    values = {f.accepts(s) for s in finals}
    if got is not None:
        assert values == {got}
    if all(len(r) == 1 for r in reach):
        assert got is not None


def test_dual_family_membership_is_involutive():
    f = fam.parse_family("card{m1,m2,m3} <= 2")
    twice = fam.fneg(fam.fneg(f))
    assert all(twice.accepts(s) == f.accepts(s) for s in _subsets(["m1", "m2", "m3"]))
