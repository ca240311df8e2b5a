import pytest

from dga import fixtures as fx
from dga.automaton import A as UNIVERSAL, is_accepting
from dga.errors import ContractError, ResourceLimitError
from dga.games import (Player, _LazySolver, accepts, build_game, extract_run, game_to_dot,
                       ndga_accepts_path, position_cap, replay, run_to_dot, solve)
from dga.graphs import LabeledGraph, complete_graph, edgeless_graph
from dga.transforms import dual

from _util import universe

AUTOMATA = fx.AUTOMATON_FIXTURES
NONDETERMINISTIC = [n for n in AUTOMATA if not fx.build(n).of_kind(UNIVERSAL)]


def test_trivial_game():
    a = fx.build("A_3color")
    g = edgeless_graph(1)
    from dga.automaton import Automaton
    perm_only = Automaton.build(["_"], ["_"], [("yes", "P")], {"_": "yes"}, [], [["yes"]])
    game = build_game(perm_only, g)
    assert len(game) == 1 and game.moves == [[]]
    v = solve(game)
    assert v.winner is Player.AUTOMATON
    run = extract_run(game, v)
    assert len(run.configurations) == 1 and run.is_accepting()
    assert accepts(a, complete_graph(3))


def test_three_color_game_size():
    a = fx.build("A_3color")
    game = build_game(a, edgeless_graph(2))
    assert game.kinds[0] == "E"
    assert len(game.moves[0]) == 9
    # every colour pair leads to the all-yes configuration
    assert len(game) == 1 + 9 + 1


def test_centric_game_shape_and_pathfinder_strategy():
    a = fx.build("A_centric")
    game = build_game(a, fx.build("G_centric_out"))
    assert game.kinds[0] == "E"
    middle = {j for j in game.moves[0]}
    assert middle and all(game.kinds[j] == "A" for j in middle)
    v = solve(game)
    assert v.winner is Player.PATHFINDER
    for j in middle:
        k = v.strategy.choice[j]
        assert game.kinds[k] == "P" and not game.automaton.engine.accepting(game.positions[k])
    assert replay(game, v)


def test_centric_accepting_run():
    a = fx.build("A_centric")
    g = fx.build("G_centric_in")
    game = build_game(a, g)
    v = solve(game)
    assert v.accepted
    run = extract_run(game, v)
    assert run.is_accepting()
    splits = [i for i in range(len(run.configurations)) if len(run.successors(i)) > 1]
    assert len(splits) == 1
    assert len(run.successors(splits[0])) == 2
    leaves = [c for i, c in enumerate(run.configurations) if not run.successors(i)]
    assert all(is_accepting(a, c) for c in leaves)
    assert not accepts(a, fx.build("G_centric_out"))


def test_examples_from_definitions():
    assert not accepts(fx.build("A_3color"), fx.build("G_loop"))
    assert accepts(fx.build("A_min3"), edgeless_graph(3))
    assert ndga_accepts_path(fx.build("A_min3"), edgeless_graph(2)) is None
    assert len(ndga_accepts_path(fx.build("A_min3"), edgeless_graph(3))) == 2


@pytest.mark.parametrize("name", AUTOMATA)
def test_lazy_solver_agrees_with_explicit_game(name):
    a = fx.build(name)
    for g in universe(name, 2):
        v = solve(build_game(a, g))
        assert accepts(a, g) == v.accepted
        for sym, prune in ((False, False), (True, False), (False, True)):
            s = _LazySolver(a, g, position_cap(), symmetry=sym, prune=prune)
            assert s.wins(a.engine.initial(g)) == v.accepted


@pytest.mark.parametrize("name", NONDETERMINISTIC)
def test_path_search_agrees_with_game(name):
    a = fx.build(name)
    for g in universe(name, 3):
        path = ndga_accepts_path(a, g)
        assert (path is not None) == accepts(a, g)


def test_path_search_rejects_universal_states():
    with pytest.raises(ContractError):
        ndga_accepts_path(fx.build("A_not3color"), edgeless_graph(1))


def test_ddga_has_one_maximal_sequence():
    a = fx.build("A_occur_abc")
    g = LabeledGraph.build(["a", "b", "c"], [(0, 1)], sigma=["a", "b", "c"])
    game = build_game(a, g)
    assert all(len(m) <= 1 for m in game.moves)


@pytest.mark.parametrize("name", AUTOMATA)
def test_levels_increase_along_moves(name):
    a = fx.build(name)
    lv = a.levels
    for g in universe(name, 2):
        game = build_game(a, g)
        for i, mv in enumerate(game.moves):
            c = game.configuration(i)
            low = min((lv[q] for q in c.states if q not in a.permanent), default=None)
            for j in mv:
                d = game.configuration(j)
                rest = [lv[q] for q in d.states if q not in a.permanent]
                assert not rest or min(rest) > low


@pytest.mark.parametrize("name", AUTOMATA)
def test_dual_swaps_winner(name):
    a = fx.build(name)
    b, _ = dual(a)
    for g in universe(name, 2):
        assert solve(build_game(a, g)).winner is solve(build_game(b, g)).winner.other()


def test_position_cap(monkeypatch):
    a = fx.build("A_not3color")
    with pytest.raises(ResourceLimitError):
        build_game(a, complete_graph(3), cap=5)
    with pytest.raises(ResourceLimitError):
        accepts(a, complete_graph(3), cap=1)
    monkeypatch.setenv("DGA_POSITION_CAP", "7")
    assert position_cap() == 7
    assert position_cap(11) == 11


def test_dot_output():
    a = fx.build("A_min3")
    game = build_game(a, edgeless_graph(3))
    v = solve(game)
    text = game_to_dot(game, v)
    assert text.startswith("digraph") and "->" in text
    assert run_to_dot(extract_run(game, v)).startswith("digraph")
    with pytest.raises(ContractError):
        extract_run(build_game(a, edgeless_graph(2)), solve(build_game(a, edgeless_graph(2))))
