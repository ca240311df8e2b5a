"""Language-level tools for nondeterministic automata.

Local views, the imitation runs behind mirroring and node merging, bounded
emptiness checks and bounded language comparison.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .automaton import A, Automaton, Configuration, Variant, classify
from .errors import ContractError, InvalidInputError, UndecidableError
from .games import Run, accepts, ndga_accepts_path, path_to_run
from .graphs import (LabeledGraph, enumerate_graphs, graph_to_json, merge_asym, merge_sym, mirror)


def _require_nondeterministic(a: Automaton, what: str) -> None:
    if a.of_kind(A):
        raise ContractError(f"{what} needs an automaton without universal states")


def _path(run) -> list[Configuration]:
    """The configurations of a run given as a sequence or as a linear :class:`Run`."""
    if isinstance(run, Run):
        out, i = [run.configurations[0]], 0
        while True:
            nxt = run.successors(i)
            if not nxt:
                return out
            if len(nxt) > 1:
                raise InvalidInputError("the run branches; local views need a single sequence")
            i = nxt[0]
            out.append(run.configurations[i])
    out = list(run)
    if not out:
        raise InvalidInputError("empty run")
    return out


# local views ------------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalView:
    """What a node receives in each round: its own state and, per edge
    symbol, the set of states of its incoming neighbours."""

    steps: tuple  # of (state, tuple of frozensets, one per edge symbol)

    def states(self) -> tuple:
        return tuple(q for q, _ in self.steps)

    def __len__(self):
        return len(self.steps)


def local_view(run, v: int) -> LocalView:
    path = _path(run)
    g = path[0].graph
    if not 0 <= v < g.n:
        raise InvalidInputError(f"node {v} is not in the graph")
    ins = g.in_lists[v]
    steps = tuple((c.states[v], tuple(frozenset(c.states[u] for u in per) for per in ins)) for c in path)
    return LocalView(steps)


def _views(path) -> list[LocalView]:
    return [local_view(path, v) for v in range(path[0].graph.n)]


def views_covered(old_path, new_path) -> bool:
    """Every node of the new run has a node of the old run with the same
    label and local view."""
    old = {(old_path[0].graph.labels[v], w) for v, w in enumerate(_views(old_path))}
    g2 = new_path[0].graph
    return all((g2.labels[v], w) in old for v, w in enumerate(_views(new_path)))


# mirroring --------------------------------------------------------------------------------


@dataclass
class MirrorEvidence:
    source_accepted: bool
    mirrored: LabeledGraph
    bijection: dict
    run: Run | None = None  # imitation run on the mirrored graph
    views_covered: bool = False
    run_accepting: bool = False

    @property
    def holds(self) -> bool:
        """The implication ``g accepted => mirror accepted`` is witnessed."""
        return not self.source_accepted or self.run_accepting


def check_mirroring(a: Automaton, g: LabeledGraph, u: Iterable[int]) -> MirrorEvidence:
    """Mirror ``u`` in ``g`` and, if ``a`` accepts ``g``, let every mirror
    node imitate its original in an accepting run."""
    _require_nondeterministic(a, "mirroring")
    g2, f = mirror(g, u)
    path = ndga_accepts_path(a, g)
    if path is None:
        return MirrorEvidence(False, g2, f)
    order = sorted(f, key=f.get)
    new = [Configuration(g2, c.states + tuple(c.states[x] for x in order)) for c in path]
    run = path_to_run(a, new)
    return MirrorEvidence(True, g2, f, run, views_covered(path, new), run.is_accepting())


# merging ----------------------------------------------------------------------------------


@dataclass
class MergeResult:
    w: int
    w2: int  # merged into w and removed
    mode: str
    graph: LabeledGraph
    run: Run


def find_merge_pair(a: Automaton, run, mode: str = "asym") -> MergeResult | None:
    """Two nodes an accepting run cannot tell apart, and the merged run.

    In ``asym`` mode the nodes must go through the same states, in ``sym``
    mode they must have the same local view.  Pairs are tried in
    lexicographic order; ``w2`` is merged into ``w``.
    """
    if mode not in ("asym", "sym"):
        raise InvalidInputError("mode must be 'asym' or 'sym'")
    _require_nondeterministic(a, "merging")
    path = _path(run)
    g = path[0].graph
    if not path_to_run(a, path).is_accepting():
        raise InvalidInputError("the given run is not an accepting run")
    views = _views(path)
    key = [w.states() for w in views] if mode == "asym" else views
    for w, w2 in itertools.combinations(range(g.n), 2):
        if key[w] != key[w2]:
            continue
        g2 = (merge_asym if mode == "asym" else merge_sym)(g, w, w2)
        new = [Configuration(g2, c.states[:w2] + c.states[w2 + 1:]) for c in path]
        merged = path_to_run(a, new)
        if not merged.is_accepting():
            raise AssertionError(f"merged run for nodes {w}, {w2} does not accept")
        return MergeResult(w, w2, mode, g2, merged)
    return None


# emptiness --------------------------------------------------------------------------------


def merging_bound(a: Automaton, undirected: bool = False) -> int:
    """Size below which a nonempty language must have a member:
    ``|Q|^(len+1)``, or ``(|Q| 2^(|Gamma| |Q|))^(len+1)`` for undirected graphs."""
    s, ell, g = a.size, a.length, len(a.gamma)
    base = s * 2 ** (g * s) if undirected else s
    return base ** (ell + 1)


@dataclass
class EmptinessVerdict:
    status: str  # NonEmpty, EmptyUpTo or EmptyProven
    bound_used: int
    theoretical_bound: int
    witness: LabeledGraph | None = None
    run: Run | None = None
    graphs_checked: int = 0

    def __post_init__(self):
        if self.status == "EmptyProven" and self.bound_used < self.theoretical_bound:
            raise ContractError("emptiness is proven only up to the theoretical bound")

    @property
    def empty(self) -> bool | None:
        if self.status == "NonEmpty":
            return False
        return True if self.status == "EmptyProven" else None

    def __str__(self):
        if self.status == "NonEmpty":
            return f"NonEmpty(witness with {self.witness.n} nodes)"
        if self.status == "EmptyUpTo":
            return f"EmptyUpTo({self.bound_used})"
        return "EmptyProven"

    def to_json(self) -> dict:
        out = {"status": self.status, "bound_used": self.bound_used,
               "theoretical_bound": self.theoretical_bound, "graphs_checked": self.graphs_checked}
        if self.witness is not None:
            out["witness"] = graph_to_json(self.witness)
            out["run"] = [list(c.states) for c in _path(self.run)]
        return out


def ndga_emptiness(a: Automaton, cap: int = 4, undirected: bool = False) -> EmptinessVerdict:
    """Search for a member by increasing size up to ``min(cap, bound)``."""
    if classify(a) is Variant.ADGA:
        raise UndecidableError("emptiness of alternating automata is undecidable; "
                               "only automata without universal states are supported")
    bound = merging_bound(a, undirected)
    limit = min(cap, bound)
    checked = 0
    for g in enumerate_graphs(limit, a.sigma, a.gamma, undirected=undirected):
        checked += 1
        path = ndga_accepts_path(a, g)
        if path is not None:
            return EmptinessVerdict("NonEmpty", limit, bound, g, path_to_run(a, path), checked)
    status = "EmptyProven" if limit >= bound else "EmptyUpTo"
    return EmptinessVerdict(status, limit, bound, graphs_checked=checked)


# language comparison ----------------------------------------------------------------------


@dataclass
class LanguageComparison:
    equal: bool
    counterexample: LabeledGraph | None = None
    accepted_by: tuple = ()  # membership of the counterexample in (a1, a2)
    graphs_checked: int = 0


def bounded_language_equal(a1: Automaton, a2: Automaton, n_max: int = 3, *, undirected: bool = False,
                           connected: bool = False, cap: int | None = None) -> LanguageComparison:
    """Compare acceptance on every graph with at most ``n_max`` nodes."""
    if a1.sigma != a2.sigma or a1.gamma != a2.gamma:
        raise InvalidInputError("the automata have different alphabets")
    checked = 0
    for g in enumerate_graphs(n_max, a1.sigma, a1.gamma, undirected=undirected, connected=connected):
        checked += 1
        x, y = accepts(a1, g, cap), accepts(a2, g, cap)
        if x != y:
            return LanguageComparison(False, g, (x, y), checked)
    return LanguageComparison(True, graphs_checked=checked)
