"""Acceptance games between the automaton and the pathfinder.

Positions are configurations.  The automaton moves in existential
configurations and the pathfinder in universal ones; permanent
configurations are sinks won by the automaton exactly when they are
accepting.  A nonpermanent configuration without successors is lost by the
player who would have to move.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
import operator
import os
import sys
from collections import Counter
from dataclasses import dataclass, field

from .automaton import Automaton, Configuration, check_universe, configuration_kind, ConfigurationKind
from .errors import ContractError, ResourceLimitError
from .graphs import LabeledGraph, automorphisms

DEFAULT_POSITION_CAP = 1_000_000


def position_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("DGA_POSITION_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_POSITION_CAP


class Player(str, enum.Enum):
    AUTOMATON = "automaton"
    PATHFINDER = "pathfinder"

    def other(self) -> "Player":
        return Player.PATHFINDER if self is Player.AUTOMATON else Player.AUTOMATON


@dataclass
class Game:
    """The explicit game graph; position 0 is the start."""

    automaton: Automaton
    graph: LabeledGraph
    positions: list  # tuples of state indices
    moves: list  # successor position indices
    kinds: list  # 'E', 'A' or 'P'

    def owner(self, i: int) -> Player | None:
        k = self.kinds[i]
        if k == "E":
            return Player.AUTOMATON
        if k == "A":
            return Player.PATHFINDER
        return None

    def is_sink(self, i: int) -> bool:
        return not self.moves[i]

    def sink_winner(self, i: int) -> Player:
        """Winner of a sink position."""
        k = self.kinds[i]
        if k == "P":
            eng = self.automaton.engine
            return Player.AUTOMATON if eng.accepting(self.positions[i]) else Player.PATHFINDER
        # a blocked player loses
        return Player.PATHFINDER if k == "E" else Player.AUTOMATON

    def configuration(self, i: int) -> Configuration:
        return Configuration(self.graph, self.automaton.engine.names_of(self.positions[i]))

    def __len__(self):
        return len(self.positions)


@dataclass(frozen=True)
class Strategy:
    owner: Player
    choice: dict  # position index -> successor position index


@dataclass(frozen=True)
class Verdict:
    winner: Player
    strategy: Strategy
    values: tuple = field(repr=False, default=())  # winner of every position

    @property
    def accepted(self) -> bool:
        return self.winner is Player.AUTOMATON


def build_game(a: Automaton, g: LabeledGraph, cap: int | None = None) -> Game:
    check_universe(a, g)
    cap = position_cap(cap)
    eng = a.engine
    start = eng.initial(g)
    positions = [start]
    index = {start: 0}
    moves: list = []
    kinds: list = []
    i = 0
    while i < len(positions):
        c = positions[i]
        k = eng.kind(c)
        kinds.append(k)
        succ_idx = []
        if k != "P":
            for s in eng.successors(g, c):
                j = index.get(s)
                if j is None:
                    j = len(positions)
                    if j >= cap:
                        raise ResourceLimitError(f"game exceeds the position cap of {cap}")
                    index[s] = j
                    positions.append(s)
                succ_idx.append(j)
        moves.append(succ_idx)
        i += 1
    return Game(a, g, positions, moves, kinds)


def solve(game: Game) -> Verdict:
    """Backward induction over the game DAG."""
    n = len(game.positions)
    win: list = [None] * n
    order = _postorder(game)
    for i in order:
        mv = game.moves[i]
        if not mv:
            win[i] = game.sink_winner(i)
            continue
        owner = game.owner(i)
        win[i] = owner if any(win[j] is owner for j in mv) else owner.other()
    winner = win[0]
    choice = {}
    for i in range(n):
        if game.moves[i] and game.owner(i) is winner:
            good = [j for j in game.moves[i] if win[j] is winner]
            choice[i] = good[0] if good else game.moves[i][0]
    return Verdict(winner, Strategy(winner, choice), tuple(win))


def _postorder(game: Game) -> list:
    seen = [False] * len(game.positions)
    out = []
    stack = [(0, 0)]
    seen[0] = True
    while stack:
        i, k = stack.pop()
        mv = game.moves[i]
        if k < len(mv):
            stack.append((i, k + 1))
            j = mv[k]
            if not seen[j]:
                seen[j] = True
                stack.append((j, 0))
        else:
            out.append(i)
    return out


def replay(game: Game, verdict: Verdict) -> bool:
    """Every play consistent with the winner's strategy ends in a sink the winner wins."""
    owner = verdict.strategy.owner
    seen = set()
    stack = [0]
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen.add(i)
        mv = game.moves[i]
        if not mv:
            if game.sink_winner(i) is not owner:
                return False
            continue
        if game.owner(i) is owner:
            j = verdict.strategy.choice.get(i)
            if j is None or j not in mv:
                return False
            stack.append(j)
        else:
            stack.extend(mv)
    return True


class _LazySolver:
    """Depth-first evaluation with memoisation, generating successors on demand.

    Configurations related by an automorphism of the labeled graph have the
    same winner, so positions are stored under a canonical representative.
    With ``prune`` a position is decided without expanding it once its
    outcome no longer depends on the play (see ``Engine.forced``).
    """

    def __init__(self, a: Automaton, g: LabeledGraph, cap: int, symmetry: bool = True, prune: bool = True):
        self.eng = a.engine
        self.prune = prune
        self.g = g
        self.cap = cap
        self.memo: dict = {}
        self.killers: dict = {}
        auts = automorphisms(g) if symmetry and g.n > 1 else []
        # a full symmetric group canonicalises by sorting
        self.sort = len(auts) == math.factorial(g.n) and g.n > 1
        inverse = [tuple(sorted(range(g.n), key=p.__getitem__)) for p in auts if p != tuple(range(g.n))]
        self.getters = [operator.itemgetter(*q) for q in inverse]

    def key(self, c: tuple) -> tuple:
        if self.sort:
            return tuple(sorted(c))
        best = c
        for get in self.getters:
            t = get(c)
            if t < best:
                best = t
        return best

    def wins(self, c: tuple, check: bool = True) -> bool:
        """Whether the automaton wins from ``c``.  ``check=False`` skips the
        forced-outcome test for positions the caller already tested."""
        eng = self.eng
        m = eng.mask(c)
        kind = eng.kind_of_mask(m)
        if kind == "P":
            return eng.accepts_mask(m)
        if self.prune and check:
            res = eng.forced_mask(m)
            if res is not None:
                return res
        k = self.key(c)
        hit = self.memo.get(k)
        if hit is not None:
            return hit
        if len(self.memo) >= self.cap:
            raise ResourceLimitError(f"game exceeds the position cap of {self.cap}")
        opts = eng.choices(self.g, c)
        if opts is None:
            res = kind == "A"
        else:
            res = self._decide(kind, eng.round_of(c), opts)
        self.memo[k] = res
        return res

    def _decide(self, kind: str, rnd: int, opts: list) -> bool:
        """Value of a position whose player picks one option per node."""
        want = kind == "E"
        picks = itertools.product(*(range(len(o)) for o in opts))
        if self.prune:
            picks = self._order(kind, rnd, opts, want)
            if picks is None:
                return want
        check = not self.prune
        for p in picks:
            if self.wins(tuple(o[i] for o, i in zip(opts, p)), check) is want:
                if self.prune:
                    self.killers[(kind, rnd)] = p
                return want
        return not want

    def _order(self, kind, rnd, opts, want):
        """Drop choices whose outcome is already fixed; ``None`` if one of
        them wins outright.  A choice that settled an earlier position of
        the same round is tried first."""
        best = self.killers.get((kind, rnd))
        forced = self.eng.forced_mask
        bits = [[1 << q for q in o] for o in opts]
        out = []
        indices = itertools.product(*(range(len(o)) for o in opts))
        for p, bs in zip(indices, itertools.product(*bits)):
            r = forced(functools.reduce(operator.or_, bs))
            if r is want:
                return None
            if r is None:
                if p == best:
                    out.insert(0, p)
                else:
                    out.append(p)
        return out


def accepts(a: Automaton, g: LabeledGraph, cap: int | None = None) -> bool:
    """Whether ``a`` accepts ``g``, i.e. the automaton wins the acceptance game."""
    check_universe(a, g)
    solver = _LazySolver(a, g, position_cap(cap))
    limit = sys.getrecursionlimit()
    need = 4 * a.length + 100
    if need > limit:
        sys.setrecursionlimit(need)
    return solver.wins(a.engine.initial(g))


# runs ------------------------------------------------------------------------------------


@dataclass(frozen=True)
class Run:
    """A run DAG; node 0 is the initial configuration."""

    automaton: Automaton
    graph: LabeledGraph
    configurations: tuple  # of Configuration
    edges: tuple  # of (i, j)

    def successors(self, i: int) -> list:
        return [j for (x, j) in self.edges if x == i]

    def is_legal(self) -> bool:
        from .automaton import global_successors, initial_configuration
        a = self.automaton
        if self.configurations[0] != initial_configuration(a, self.graph):
            return False
        for i, c in enumerate(self.configurations):
            succ = {self.configurations[j] for j in self.successors(i)}
            options = set(global_successors(a, c))
            kind = configuration_kind(a, c)
            if kind is ConfigurationKind.PERMANENT:
                if succ:
                    return False
            elif kind is ConfigurationKind.EXISTENTIAL:
                if len(succ) != 1 or not succ <= options:
                    return False
            elif succ != options:
                return False
        return True

    def is_accepting(self) -> bool:
        a = self.automaton
        for c in self.configurations:
            if configuration_kind(a, c) is ConfigurationKind.PERMANENT and not a.accepts_set(c.state_set()):
                return False
        return self.is_legal()

    def states_of(self, v: int) -> list:
        """State sequences of node ``v`` along every maximal path, deduplicated."""
        out = []
        paths = [[0]]
        done = []
        while paths:
            p = paths.pop()
            nxt = self.successors(p[-1])
            if not nxt:
                done.append(p)
            for j in nxt:
                paths.append(p + [j])
        for p in done:
            seq = tuple(self.configurations[i].states[v] for i in p)
            if seq not in out:
                out.append(seq)
        return out


def extract_run(game: Game, verdict: Verdict) -> Run:
    """The run induced by a winning automaton strategy."""
    if verdict.winner is not Player.AUTOMATON:
        raise ContractError("there is no accepting run: the pathfinder wins")
    keep = {}
    order = []
    edges = []
    stack = [0]
    keep[0] = 0
    order.append(0)
    while stack:
        i = stack.pop()
        mv = game.moves[i]
        if not mv:
            continue
        targets = [verdict.strategy.choice[i]] if game.owner(i) is Player.AUTOMATON else mv
        for j in targets:
            if j not in keep:
                keep[j] = len(order)
                order.append(j)
                stack.append(j)
            edges.append((keep[i], keep[j]))
    configs = tuple(game.configuration(i) for i in order)
    return Run(game.automaton, game.graph, configs, tuple(edges))


def ndga_accepts_path(a: Automaton, g: LabeledGraph, cap: int | None = None) -> list | None:
    """An accepting sequence of configurations of a nondeterministic automaton."""
    from .automaton import A
    if a.of_kind(A):
        raise ContractError("path search needs an automaton without universal states")
    check_universe(a, g)
    eng = a.engine
    cap = position_cap(cap)
    failed = set()

    def search(c):
        if c in failed:
            return None
        if len(failed) >= cap:
            raise ResourceLimitError(f"search exceeds the position cap of {cap}")
        if eng.kind(c) == "P":
            if eng.accepting(c):
                return [c]
            failed.add(c)
            return None
        for s in eng.successors(g, c):
            tail = search(s)
            if tail is not None:
                return [c] + tail
        failed.add(c)
        return None

    path = search(eng.initial(g))
    if path is None:
        return None
    return [Configuration(g, eng.names_of(c)) for c in path]


def path_to_run(a: Automaton, path: list) -> Run:
    edges = tuple((i, i + 1) for i in range(len(path) - 1))
    return Run(a, path[0].graph, tuple(path), edges)


# DOT -------------------------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def multiset_label(states) -> str:
    counts = Counter(states)
    return ", ".join(q if k == 1 else f"{q}×{k}" for q, k in sorted(counts.items()))


def game_to_dot(game: Game, verdict: Verdict | None = None) -> str:
    """Existential positions are boxes, universal ones triangles, permanent ones
    circles; accepting sinks are double circles.  Strategy edges are bold."""
    lines = ["digraph game {", "  rankdir=TB;"]
    names = game.automaton.engine.names_of
    for i, c in enumerate(game.positions):
        k = game.kinds[i]
        if k == "E":
            shape = "box"
        elif k == "A":
            shape = "triangle"
        elif game.automaton.engine.accepting(c):
            shape = "doublecircle"
        else:
            shape = "circle"
        lines.append(f"  p{i} [shape={shape}, label={_quote(multiset_label(names(c)))}];")
    for i, mv in enumerate(game.moves):
        for j in mv:
            bold = verdict is not None and verdict.strategy.choice.get(i) == j
            lines.append(f"  p{i} -> p{j}" + (" [style=bold, color=red];" if bold else ";"))
    lines.append("}")
    return "\n".join(lines) + "\n"


def run_to_dot(run: Run) -> str:
    a = run.automaton
    lines = ["digraph run {", "  rankdir=TB;"]
    for i, c in enumerate(run.configurations):
        kind = configuration_kind(a, c)
        if kind is ConfigurationKind.EXISTENTIAL:
            shape = "box"
        elif kind is ConfigurationKind.UNIVERSAL:
            shape = "triangle"
        else:
            shape = "doublecircle" if a.accepts_set(c.state_set()) else "circle"
        lines.append(f"  c{i} [shape={shape}, label={_quote(multiset_label(c.states))}];")
    for i, j in run.edges:
        lines.append(f"  c{i} -> c{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
