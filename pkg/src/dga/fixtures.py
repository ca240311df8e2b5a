"""Example automata and graphs, each automaton paired with a language oracle.

The oracles are direct brute-force predicates on graphs and do not use any
automaton machinery.  ``restriction`` names the class of inputs on which an
automaton is meant to agree with its oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from .automaton import Automaton
from .graphs import (BLANK, LabeledGraph, complete_graph, has_minor, is_connected, is_undirected,
                     is_valid_coloring, mirror)

COLORS = ("spade", "heart", "club")


def a_3color() -> Automaton:
    """Guess a colour per node, then every node checks its incoming neighbours."""
    rules = [("ini", "true", list(COLORS))]
    for c in COLORS:
        rules.append((c, f"has({c})", ["no"]))
        rules.append((c, f"!has({c})", ["yes"]))
    return Automaton.build(
        [BLANK], [BLANK],
        [("ini", "E")] + [(c, "E") for c in COLORS] + [("yes", "P"), ("no", "P")],
        {BLANK: "ini"}, rules, [["yes"]])


def a_not3color() -> Automaton:
    """The pathfinder picks the colouring; some conflict must always be found."""
    rules = [("ini", "true", list(COLORS))]
    for c in COLORS:
        rules.append((c, f"has({c})", ["no"]))
        rules.append((c, f"!has({c})", ["yes"]))
    return Automaton.build(
        [BLANK], [BLANK],
        [("ini", "A")] + [(c, "A") for c in COLORS] + [("yes", "P"), ("no", "P")],
        {BLANK: "ini"}, rules, [["no"], ["no", "yes"]])


def a_centric() -> Automaton:
    """Valid 3-colouring with a single ``a`` surrounded by ``b`` nodes, at least two
    of them incoming."""
    return Automaton.build(
        ["a", "b", "c"], [BLANK],
        [("qa", "E"), ("qb", "E"), ("qc", "E"),
         ("qa1", "A"), ("qb_club", "A"), ("qb_diamond", "A"),
         ("qa_spade", "P"), ("qa_heart", "P"), ("yes", "P"), ("no", "P")],
        {"a": "qa", "b": "qb", "c": "qc"},
        [("qa", "true", ["qa1"]),
         ("qb", "has(qb)", ["no"]),
         ("qb", "!has(qb)", ["qb_club", "qb_diamond"]),
         ("qc", "has(qc) | has(qa)", ["no"]),
         ("qc", "!has(qc) & !has(qa)", ["yes"]),
         ("qa1", "eq({qb_club,qb_diamond})", ["qa_spade", "qa_heart"]),
         ("qa1", "!eq({qb_club,qb_diamond})", ["no"]),
         ("qb_club", "true", ["yes"]),
         ("qb_diamond", "true", ["yes"])],
        [["qa_spade", "yes"], ["qa_heart", "yes"]])


def _any_has(state, gamma):
    return " | ".join(f"has({state})@{g}" for g in gamma)


def a_conn(sigma=(BLANK,), gamma=(BLANK,)) -> Automaton:
    """Every node picks one of two markers; a node seeing the other marker raises ``acc``."""
    sigma, gamma = sorted(sigma), sorted(gamma)
    return Automaton.build(
        sigma, gamma,
        [("ini", "A"), ("spade", "E"), ("heart", "E"), ("spade2", "P"), ("heart2", "P"), ("acc", "P")],
        {s: "ini" for s in sigma},
        [("ini", "true", ["spade", "heart"]),
         ("spade", _any_has("heart", gamma), ["acc"]),
         ("spade", f"!({_any_has('heart', gamma)})", ["spade2"]),
         ("heart", _any_has("spade", gamma), ["acc"]),
         ("heart", f"!({_any_has('spade', gamma)})", ["heart2"])],
        "is{spade2} | is{heart2} | in(acc)")


def a_tree() -> Automaton:
    """On connected graphs: a unique node without incoming neighbours, all others
    with exactly one."""
    return Automaton.build(
        [BLANK], [BLANK],
        [("ini", "E"), ("noin", "A"), ("inc", "A"), ("spade2", "E"), ("heart2", "E"),
         ("root_spade", "P"), ("root_heart", "P"), ("yes", "P"), ("no", "P")],
        {BLANK: "ini"},
        [("ini", "card = 0", ["noin"]),
         ("ini", "card >= 1", ["inc"]),
         ("noin", "true", ["root_spade", "root_heart"]),
         ("inc", "true", ["spade2", "heart2"]),
         ("spade2", "card = 1", ["yes"]),
         ("spade2", "card != 1", ["no"]),
         ("heart2", "card = 1", ["yes"]),
         ("heart2", "card != 1", ["no"])],
        [["root_spade"], ["root_heart"], ["root_spade", "yes"], ["root_heart", "yes"]])


def _subsets(xs):
    return [frozenset(c) for r in range(len(xs) + 1) for c in itertools.combinations(xs, r)]


def _rcv_name(r):
    return "rcv_" + ("+".join(sorted(r)) if r else "none")


def a_undir(sigma=(BLANK,), gamma=(BLANK,)) -> Automaton:
    """Senders are chosen universally; silent nodes report on which edge kinds they
    heard a sender and senders check that their incoming neighbours heard them."""
    sigma, gamma = sorted(sigma), sorted(gamma)
    reports = _subsets(gamma)
    rules = [("ini", "true", ["send", "silent"]), ("send", "true", ["send2"])]
    for r in reports:
        parts = [f"has(send)@{g}" if g in r else f"!has(send)@{g}" for g in gamma]
        rules.append(("silent", " & ".join(parts), [_rcv_name(r)]))
    bad = [f"has({_rcv_name(r)})@{g}" for g in gamma for r in reports if g not in r]
    bad_guard = " | ".join(bad)
    rules.append(("send2", bad_guard, ["no"]))
    rules.append(("send2", f"!({bad_guard})", ["ok"]))
    states = ([("ini", "A"), ("send", "E"), ("silent", "E"), ("send2", "A")]
              + [(_rcv_name(r), "P") for r in reports] + [("ok", "P"), ("no", "P")])
    return Automaton.build(sigma, gamma, states, {s: "ini" for s in sigma}, rules, "!in(no)")


def a_minor_k3() -> Automaton:
    """On undirected graphs: guess three disjoint node sets, check each is connected
    with markers and that each meets the next one."""
    states = [("ini", "E"), ("out", "P"), ("acc", "P")]
    rules = [("ini", "true", ["out", "u1", "u2", "u3"])]
    clauses = []
    for i in (1, 2, 3):
        j = i % 3 + 1
        states.append((f"u{i}", "A"))
        rules.append((f"u{i}", "true", [f"u{i}_spade", f"u{i}_heart"]))
        for m, other in (("spade", "heart"), ("heart", "spade")):
            q = f"u{i}_{m}"
            states.append((q, "E"))
            states.append((f"{q}_adj", "P"))
            states.append((f"{q}_nadj", "P"))
            nxt = f"(has(u{j}_spade) | has(u{j}_heart))"
            rules.append((q, f"has(u{i}_{other})", ["acc"]))
            rules.append((q, f"!has(u{i}_{other}) & {nxt}", [f"{q}_adj"]))
            rules.append((q, f"!has(u{i}_{other}) & !{nxt}", [f"{q}_nadj"]))
        clauses.append(
            f"!(groups{{{{u{i}_spade_adj,u{i}_spade_nadj}}}} >= 1 & groups{{{{u{i}_heart_adj,u{i}_heart_nadj}}}} >= 1)"
            f" & card{{u{i}_spade_adj,u{i}_heart_adj}} >= 1")
    order = {"E": 0, "A": 1, "P": 2}
    states.sort(key=lambda s: (order[s[1]], s[0]))
    return Automaton.build([BLANK], [BLANK], states, {BLANK: "ini"}, rules,
                           "in(acc) | (" + " & ".join(clauses) + ")")


MARKERS = ("m1", "m2", "m3")


def a_max2() -> Automaton:
    """The pathfinder spreads three markers; at most two may appear."""
    return Automaton.build([BLANK], [BLANK], [("ini", "A")] + [(m, "P") for m in MARKERS],
                           {BLANK: "ini"}, [("ini", "true", list(MARKERS))],
                           "card{m1,m2,m3} <= 2")


def a_min3() -> Automaton:
    """The automaton spreads three markers and must use all of them."""
    return Automaton.build([BLANK], [BLANK], [("ini", "E")] + [(m, "P") for m in MARKERS],
                           {BLANK: "ini"}, [("ini", "true", list(MARKERS))],
                           "!(card{m1,m2,m3} <= 2)")


def a_occur_abc() -> Automaton:
    """Each node announces its label; all three labels must be announced."""
    return Automaton.build(
        ["a", "b", "c"], [BLANK],
        [("qa", "E"), ("qb", "E"), ("qc", "E"), ("pa", "P"), ("pb", "P"), ("pc", "P")],
        {"a": "qa", "b": "qb", "c": "qc"},
        [("qa", "true", ["pa"]), ("qb", "true", ["pb"]), ("qc", "true", ["pc"])],
        [["pa", "pb", "pc"]])


# oracles ---------------------------------------------------------------------------------


def three_colorable(g: LabeledGraph) -> bool:
    for colors in itertools.product(range(3), repeat=g.n):
        if all(colors[u] != colors[v] for es in g.edges for (u, v) in es):
            return True
    return False


def centric(g: LabeledGraph) -> bool:
    if not is_valid_coloring(g):
        return False
    a_nodes = [v for v in g.nodes if g.labels[v] == "a"]
    if len(a_nodes) != 1:
        return False
    va = a_nodes[0]
    ins = {u for es in g.edges for (u, v) in es if v == va}
    outs = {v for es in g.edges for (u, v) in es if u == va}
    if any(g.labels[x] != "b" for x in ins | outs):
        return False
    return len(ins) >= 2


def directed_tree(g: LabeledGraph) -> bool:
    ins = [set() for _ in g.nodes]
    for es in g.edges:
        for u, v in es:
            ins[v].add(u)
    roots = [v for v in g.nodes if not ins[v]]
    return len(roots) == 1 and all(len(ins[v]) == 1 for v in g.nodes if v != roots[0])


def minor_k3(g: LabeledGraph) -> bool:
    lab = g.sigma.symbols[0]
    k3 = LabeledGraph.build([lab] * 3, [(u, v) for u in range(3) for v in range(3) if u != v],
                            sigma=g.sigma, gamma=g.gamma)
    return has_minor(g, k3)


@dataclass(frozen=True)
class FixtureEntry:
    name: str
    build: Callable
    oracle: Callable | None = None
    restriction: str = "none"  # none | connected | undirected
    universe: int = 3
    sigma: tuple = (BLANK,)
    gamma: tuple = (BLANK,)
    description: str = ""

    @property
    def kind(self) -> str:
        return "automaton" if self.oracle is not None else "graph"

    def admits(self, g: LabeledGraph) -> bool:
        if self.restriction == "connected":
            return is_connected(g)
        if self.restriction == "undirected":
            return is_undirected(g)
        return True


# graphs ----------------------------------------------------------------------------------


def g_centric_in() -> LabeledGraph:
    """Five nodes: an ``a`` with two ``b`` in-neighbours, a third ``b`` and a ``c``."""
    und = [(0, 1), (0, 2), (1, 4), (2, 4), (3, 4)]
    return LabeledGraph.build(["a", "b", "b", "b", "c"], [e for u, v in und for e in ((u, v), (v, u))],
                              sigma=["a", "b", "c"])


def g_centric_out() -> LabeledGraph:
    """Square with alternating labels ``a b a b``: two ``a`` nodes."""
    und = [(0, 1), (1, 2), (2, 3), (3, 0)]
    return LabeledGraph.build(["a", "b", "a", "b"], [e for u, v in und for e in ((u, v), (v, u))],
                              sigma=["a", "b", "c"])


def g_k3() -> LabeledGraph:
    return complete_graph(3)


def g_loop() -> LabeledGraph:
    return LabeledGraph.build([BLANK], [(0, 0)])


def g_two_nodes() -> LabeledGraph:
    return LabeledGraph.build([BLANK, BLANK], [(0, 1), (1, 0)])


def g_three_nodes() -> LabeledGraph:
    return mirror(g_two_nodes(), [0])[0]


def g_mirror_source() -> LabeledGraph:
    """Path ``a -> b -> c -> a`` over ``{a,b,c}``."""
    return LabeledGraph.build(["a", "b", "c", "a"], [(0, 1), (1, 2), (2, 3)], sigma=["a", "b", "c"])


def g_mirror_image() -> LabeledGraph:
    """The path with its last three nodes mirrored."""
    return mirror(g_mirror_source(), [1, 2, 3])[0]


FIXTURES: dict[str, FixtureEntry] = {}


def _register(entry: FixtureEntry):
    FIXTURES[entry.name] = entry


for _e in [
    FixtureEntry("A_3color", a_3color, three_colorable, universe=4,
                 description="3-colourable graphs"),
    FixtureEntry("A_not3color", a_not3color, lambda g: not three_colorable(g),
                 description="graphs that are not 3-colourable"),
    FixtureEntry("A_centric", a_centric, centric, sigma=("a", "b", "c"),
                 description="valid colouring, one a whose neighbours are b's, two incoming"),
    FixtureEntry("A_conn", a_conn, is_connected, description="weakly connected graphs"),
    FixtureEntry("A_tree", a_tree, directed_tree, restriction="connected",
                 description="rooted directed trees (on connected inputs)"),
    FixtureEntry("A_undir", a_undir, is_undirected, description="undirected graphs"),
    FixtureEntry("A_minor_K3", a_minor_k3, minor_k3, restriction="undirected",
                 description="K3 minor (on undirected inputs)"),
    FixtureEntry("A_max2", a_max2, lambda g: g.n <= 2, universe=4, description="at most two nodes"),
    FixtureEntry("A_min3", a_min3, lambda g: g.n >= 3, universe=4, description="at least three nodes"),
    FixtureEntry("A_occur_abc", a_occur_abc, lambda g: set(g.labels) == {"a", "b", "c"}, universe=4,
                 sigma=("a", "b", "c"), description="every label occurs"),
    FixtureEntry("G_centric_in", g_centric_in, description="graph in the language of A_centric"),
    FixtureEntry("G_centric_out", g_centric_out, description="graph outside the language of A_centric"),
    FixtureEntry("G_K3", g_k3, description="bidirectional triangle"),
    FixtureEntry("G_loop", g_loop, description="single node with a self-loop"),
    FixtureEntry("G_two_nodes", g_two_nodes, description="two nodes joined both ways"),
    FixtureEntry("G_three_nodes", g_three_nodes, description="G_two_nodes with one node mirrored"),
    FixtureEntry("G_mirror_source", g_mirror_source, description="labeled path before mirroring"),
    FixtureEntry("G_mirror_image", g_mirror_image, description="the path after mirroring three nodes"),
]:
    _register(_e)

ALIASES = {"A_occur": "A_occur_abc"}
AUTOMATON_FIXTURES = tuple(name for name, e in FIXTURES.items() if e.kind == "automaton")


def entry(name: str) -> FixtureEntry:
    name = ALIASES.get(name, name)
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    return FIXTURES[name]


def build(name: str):
    return entry(name).build()
