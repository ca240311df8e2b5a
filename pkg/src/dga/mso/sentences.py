"""Example sentences used as benchmarks and oracles."""

from __future__ import annotations

from ..graphs import LabeledGraph
from .syntax import Formula, parse

THREE_COLOR = """
exists R, G, B (
  forall u ((u in R | u in G | u in B) & !(u in R & u in G) & !(u in R & u in B) & !(u in G & u in B))
  & forall u, v (u -> v => !(u in R & v in R) & !(u in G & v in G) & !(u in B & v in B))
)
"""

CENTRIC = """
forall u, v (u -> v => !(lab[b](u) & lab[b](v)) & !(lab[c](u) & lab[c](v)))
& exists va (
    forall u ((lab[a](u) <=> u = va) & (u -> va | va -> u => lab[b](u)))
    & exists u1, u2 (u1 -> va & u2 -> va & !u1 = u2)
)
"""


def phi_3color() -> Formula:
    """3-colourability over a single label and edge symbol."""
    return parse(THREE_COLOR)


def phi_centric() -> Formula:
    """The centred-graph language over labels a, b, c."""
    return parse(CENTRIC)


def _adjacent(u: str, v: str, gamma: str | None) -> str:
    arrow = "->" if gamma is None else f"->[{gamma}]"
    return f"({u} {arrow} {v} | {v} {arrow} {u})"


def connected_text(big: str, gamma: str | None = None) -> str:
    """``G[big]`` is connected: every subset closed under adjacency inside ``big``
    that meets it already contains all of it."""
    adj = _adjacent("u", "v", gamma)
    return (f"forall X ((exists u (u in X) & forall u (u in X => u in {big})"
            f" & forall u, v (u in X & v in {big} & {adj} => v in X))"
            f" => forall u (u in {big} => u in X))")


def minor_sentence(h: LabeledGraph, gamma: str | None = None) -> Formula:
    """``h`` (read as undirected and loop-free) is a minor of the input graph.

    There are disjoint nonempty connected branch sets ``U1 .. Un``, and each
    edge of ``h`` is realised by an edge between the corresponding sets.
    """
    n = h.n
    sets = [f"U{i + 1}" for i in range(n)]
    parts = []
    for s in sets:
        parts.append(f"exists u (u in {s})")
    for i in range(n):
        for j in range(i + 1, n):
            parts.append(f"forall u (!(u in {sets[i]} & u in {sets[j]}))")
    for s in sets:
        parts.append(connected_text(s, gamma))
    pairs = sorted({(min(u, v), max(u, v)) for es in h.edges for u, v in es if u != v})
    for i, j in pairs:
        parts.append(f"exists u, v (u in {sets[i]} & v in {sets[j]} & {_adjacent('u', 'v', gamma)})")
    body = " & ".join(f"({p})" for p in parts)
    return parse(f"exists {', '.join(sets)} ({body})")


def phi_minor_k3(gamma: str | None = None) -> Formula:
    from ..graphs import complete_graph
    return minor_sentence(complete_graph(3), gamma)


def phi_planar() -> Formula:
    """Neither K5 nor K3,3 is a minor (unlabeled, single edge symbol)."""
    from ..graphs import complete_graph
    k5 = complete_graph(5)
    k33 = LabeledGraph.build(["_"] * 6, [(i, j) for i in range(3) for j in range(3, 6)])
    return parse(f"!({minor_sentence(k5)}) & !({minor_sentence(k33)})")


BENCHMARKS = {
    "phi_3color": phi_3color,
    "phi_centric": phi_centric,
    "phi_minor_K3": phi_minor_k3,
}
