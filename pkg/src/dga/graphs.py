"""Labeled directed graphs over a node alphabet and an edge alphabet.

Graphs are immutable and nodes are the integers ``0..n-1``.  Operations that
remove or add nodes return new graphs and renumber deterministically.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import AlphabetMismatchError, InvalidInputError, ResourceLimitError

BLANK = "_"

# enumeration works on bitmasks of n*n*|Gamma| bits held in numpy arrays
MAX_ENUMERATION_BITS = 22


@dataclass(frozen=True)
class Alphabet:
    """A finite set of symbols iterated in lexicographic order."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(self.symbols)
        if not syms:
            raise InvalidInputError("alphabets must be nonempty")
        if len(set(syms)) != len(syms):
            raise InvalidInputError(f"duplicate symbol in alphabet {syms!r}")
        for s in syms:
            if not isinstance(s, str) or not s:
                raise InvalidInputError(f"alphabet symbols must be nonempty strings, got {s!r}")
        object.__setattr__(self, "symbols", tuple(sorted(syms)))

    @classmethod
    def of(cls, symbols: Iterable[str]) -> "Alphabet":
        if isinstance(symbols, Alphabet):
            return symbols
        if isinstance(symbols, str):
            symbols = [symbols]
        return cls(tuple(symbols))

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, item):
        return item in self.symbols

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    def __repr__(self):
        return "Alphabet(" + ",".join(self.symbols) + ")"


UNLABELED = Alphabet((BLANK,))


@dataclass(frozen=True)
class LabeledGraph:
    """A ``(sigma, gamma)``-graph.

    ``edges`` holds one frozenset of ``(u, v)`` pairs per edge symbol, aligned
    with ``gamma.symbols``.
    """

    sigma: Alphabet
    gamma: Alphabet
    labels: tuple[str, ...]
    edges: tuple[frozenset, ...]

    def __post_init__(self):
        n = len(self.labels)
        if n == 0:
            raise InvalidInputError("graphs must have at least one node")
        for lab in self.labels:
            if lab not in self.sigma:
                raise InvalidInputError(f"node label {lab!r} is not in {self.sigma!r}")
        if len(self.edges) != len(self.gamma):
            raise InvalidInputError("one edge set per edge symbol is required")
        for es in self.edges:
            for u, v in es:
                if not (0 <= u < n and 0 <= v < n):
                    raise InvalidInputError(f"edge ({u}, {v}) refers to a missing node")

    @classmethod
    def build(cls, labels: Iterable[str], edges: Mapping[str, Iterable] | Iterable = (),
              sigma: Iterable[str] | None = None, gamma: Iterable[str] | None = None) -> "LabeledGraph":
        """Convenience constructor.

        ``edges`` is either a mapping from edge symbol to pairs, or a plain
        iterable of pairs when there is a single edge symbol.
        """
        labels = tuple(labels)
        sig = Alphabet.of(sigma) if sigma is not None else Alphabet.of(sorted(set(labels)))
        if isinstance(edges, Mapping):
            gam = Alphabet.of(gamma) if gamma is not None else Alphabet.of(sorted(edges) or [BLANK])
            for key in edges:
                if key not in gam:
                    raise InvalidInputError(f"edge symbol {key!r} is not in {gam!r}")
            sets = tuple(frozenset((int(u), int(v)) for u, v in edges.get(g, ())) for g in gam)
        else:
            gam = Alphabet.of(gamma) if gamma is not None else UNLABELED
            if len(gam) != 1:
                raise InvalidInputError("pass a mapping of edge sets when there are several edge symbols")
            sets = (frozenset((int(u), int(v)) for u, v in edges),)
        return cls(sig, gam, labels, sets)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def nodes(self) -> range:
        return range(len(self.labels))

    def edge_set(self, g: str) -> frozenset:
        return self.edges[self.gamma.index(g)]

    def edge_map(self) -> dict[str, frozenset]:
        return dict(zip(self.gamma.symbols, self.edges))

    def has_edge(self, u: int, v: int, g: str | None = None) -> bool:
        if g is None:
            return any((u, v) in es for es in self.edges)
        return (u, v) in self.edge_set(g)

    @cached_property
    def in_lists(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """``in_lists[v][i]`` are the incoming neighbours of ``v`` along ``gamma[i]``."""
        n = self.n
        acc = [[[] for _ in self.edges] for _ in range(n)]
        for i, es in enumerate(self.edges):
            for u, v in sorted(es):
                acc[v][i].append(u)
        return tuple(tuple(tuple(x) for x in per) for per in acc)

    @cached_property
    def undirected_adjacency(self) -> tuple[frozenset, ...]:
        adj = [set() for _ in range(self.n)]
        for es in self.edges:
            for u, v in es:
                if u != v:
                    adj[u].add(v)
                    adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def edge_mask(self) -> int:
        """Edge relation as an integer with bit ``i*n*n + u*n + v`` per edge."""
        n = self.n
        mask = 0
        for i, es in enumerate(self.edges):
            for u, v in es:
                mask |= 1 << (i * n * n + u * n + v)
        return mask

    def relabel(self, perm: Mapping[int, int] | list[int]) -> "LabeledGraph":
        """Rename node ``v`` to ``perm[v]``."""
        perm = list(perm[v] for v in range(self.n))
        if sorted(perm) != list(range(self.n)):
            raise InvalidInputError("relabel needs a permutation of the nodes")
        labels = [None] * self.n
        for v, p in enumerate(perm):
            labels[p] = self.labels[v]
        edges = tuple(frozenset((perm[u], perm[v]) for u, v in es) for es in self.edges)
        return LabeledGraph(self.sigma, self.gamma, tuple(labels), edges)

    def __repr__(self):
        parts = []
        for g, es in zip(self.gamma.symbols, self.edges):
            if es:
                parts.append(f"{g}:{sorted(es)}")
        return f"LabeledGraph({list(self.labels)}, {' '.join(parts) or 'no edges'})"


def _check_same_universe(g1: LabeledGraph, g2: LabeledGraph) -> None:
    if g1.sigma != g2.sigma or g1.gamma != g2.gamma:
        raise AlphabetMismatchError(
            f"graphs live in distinct universes: {g1.sigma!r}/{g1.gamma!r} vs {g2.sigma!r}/{g2.gamma!r}")


def _label_order_perms(labels: tuple[str, ...]) -> tuple[tuple[str, ...], list[list[int]]]:
    """All permutations sending the nodes onto positions sorted by label."""
    sorted_labels = tuple(sorted(labels))
    slots: dict[str, list[int]] = {}
    for pos, lab in enumerate(sorted_labels):
        slots.setdefault(lab, []).append(pos)
    members: dict[str, list[int]] = {}
    for v, lab in enumerate(labels):
        members.setdefault(lab, []).append(v)
    groups = sorted(members)
    perms = []
    for choice in itertools.product(*(itertools.permutations(slots[lab]) for lab in groups)):
        perm = [0] * len(labels)
        for lab, targets in zip(groups, choice):
            for v, t in zip(members[lab], targets):
                perm[v] = t
        perms.append(perm)
    return sorted_labels, perms


def canonical_form(g: LabeledGraph) -> tuple:
    """Isomorphism invariant key; equal keys iff isomorphic graphs.

    Exhaustive minimisation over label-preserving permutations.
    """
    n = g.n
    sorted_labels, perms = _label_order_perms(g.labels)
    bits = [(i, u, v) for i, es in enumerate(g.edges) for (u, v) in es]
    best = None
    for perm in perms:
        m = 0
        for i, u, v in bits:
            m |= 1 << (i * n * n + perm[u] * n + perm[v])
        if best is None or m < best:
            best = m
    return (g.sigma.symbols, g.gamma.symbols, sorted_labels, best)


def canonical_graph(g: LabeledGraph) -> LabeledGraph:
    key = canonical_form(g)
    return _graph_from_mask(g.sigma, g.gamma, key[2], key[3])


def isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    _check_same_universe(g1, g2)
    if g1.n != g2.n or sorted(g1.labels) != sorted(g2.labels):
        return False
    if sorted(len(e) for e in g1.edges) != sorted(len(e) for e in g2.edges):
        return False
    return canonical_form(g1) == canonical_form(g2)


def automorphisms(g: LabeledGraph) -> list[tuple[int, ...]]:
    """Label and edge preserving permutations, identity first."""
    n = g.n
    members: dict[str, list[int]] = {}
    for v, lab in enumerate(g.labels):
        members.setdefault(lab, []).append(v)
    groups = sorted(members)
    result = []
    for choice in itertools.product(*(itertools.permutations(members[lab]) for lab in groups)):
        perm = [0] * n
        for lab, targets in zip(groups, choice):
            for v, t in zip(members[lab], targets):
                perm[v] = t
        if all(frozenset((perm[u], perm[v]) for u, v in es) == es for es in g.edges):
            result.append(tuple(perm))
    result.sort(key=lambda p: p != tuple(range(n)))
    return result


def _graph_from_mask(sigma: Alphabet, gamma: Alphabet, labels, mask: int) -> LabeledGraph:
    n = len(labels)
    nn = n * n
    edges = []
    for i in range(len(gamma)):
        block = (mask >> (i * nn)) & ((1 << nn) - 1)
        es = []
        while block:
            low = block & -block
            b = low.bit_length() - 1
            es.append((b // n, b % n))
            block ^= low
        edges.append(frozenset(es))
    return LabeledGraph(sigma, gamma, tuple(labels), tuple(edges))


def _orbit_representatives(n: int, n_gamma: int, perms: list[list[int]]) -> np.ndarray:
    """Edge masks that are minimal within their orbit under ``perms``."""
    nb = n * n * n_gamma
    if nb > MAX_ENUMERATION_BITS:
        raise ResourceLimitError(
            f"enumerating graphs with {n} nodes and {n_gamma} edge symbols needs 2^{nb} edge sets")
    masks = np.arange(1 << nb, dtype=np.uint64)
    best = masks.copy()
    identity = list(range(n))
    for perm in perms:
        if perm == identity:
            continue
        moved = np.zeros_like(masks)
        for i in range(n_gamma):
            for u in range(n):
                for v in range(n):
                    src = i * n * n + u * n + v
                    dst = i * n * n + perm[u] * n + perm[v]
                    moved |= ((masks >> np.uint64(src)) & np.uint64(1)) << np.uint64(dst)
        np.minimum(best, moved, out=best)
    return masks[best == masks]


def enumerate_graphs(n_max: int, sigma: Iterable[str] | Alphabet = UNLABELED,
                     gamma: Iterable[str] | Alphabet = UNLABELED, *, n_min: int = 1,
                     undirected: bool = False, connected: bool = False) -> Iterator[LabeledGraph]:
    """Yield every graph with ``n_min..n_max`` nodes exactly once up to isomorphism.

    Order: by node count, then by the sorted label vector, then by the
    canonical edge mask.  The yielded graph is the canonical representative.
    """
    sigma = Alphabet.of(sigma)
    gamma = Alphabet.of(gamma)
    for n in range(max(1, n_min), n_max + 1):
        for labels in itertools.combinations_with_replacement(sigma.symbols, n):
            # permutations preserving this sorted label vector
            perms = []
            blocks = [list(grp) for _, grp in itertools.groupby(range(n), key=lambda v: labels[v])]
            for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
                perm = [0] * n
                for b, targets in zip(blocks, choice):
                    for v, t in zip(b, targets):
                        perm[v] = t
                perms.append(perm)
            for mask in _orbit_representatives(n, len(gamma), perms):
                g = _graph_from_mask(sigma, gamma, labels, int(mask))
                if undirected and not is_undirected(g):
                    continue
                if connected and not is_connected(g):
                    continue
                yield g


def count_graphs(n_max: int, sigma=UNLABELED, gamma=UNLABELED, **kw) -> int:
    return sum(1 for _ in enumerate_graphs(n_max, sigma, gamma, **kw))


def is_connected(g: LabeledGraph) -> bool:
    """Weak connectivity of the underlying undirected graph."""
    adj = g.undirected_adjacency
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == g.n


def is_undirected(g: LabeledGraph) -> bool:
    return all((v, u) in es for es in g.edges for (u, v) in es)


def is_valid_coloring(g: LabeledGraph) -> bool:
    """No edge of any kind joins two nodes with the same label (loops included)."""
    return all(g.labels[u] != g.labels[v] for es in g.edges for (u, v) in es)


def _induced_connected(adj, part: list[int]) -> bool:
    if not part:
        return False
    members = set(part)
    seen = {part[0]}
    stack = [part[0]]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v in members and v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(members)


def has_minor(g: LabeledGraph, h: LabeledGraph) -> bool:
    """Whether ``h`` is a minor of ``g``.

    Both graphs must be undirected with a single edge symbol and ``h`` must be
    loop-free.  Exhaustive search over assignments of the nodes of ``g`` to the
    branch sets of ``h`` (or to none).
    """
    for x in (g, h):
        if len(x.gamma) != 1 or not is_undirected(x):
            raise InvalidInputError("has_minor expects undirected graphs with one edge symbol")
    if any(u == v for (u, v) in h.edges[0]):
        raise InvalidInputError("the minor must be loop-free")
    k = h.n
    if k > g.n:
        return False
    adj = g.undirected_adjacency
    h_edges = [(u, v) for (u, v) in h.edges[0] if u < v]
    for assign in itertools.product(range(k + 1), repeat=g.n):
        parts = [[] for _ in range(k)]
        for v, a in enumerate(assign):
            if a:
                parts[a - 1].append(v)
        if any(not p for p in parts):
            continue
        # symmetry pruning would change the search order, keep it exhaustive
        if not all(any(w in adj[x] for x in parts[i] for w in parts[j]) for i, j in h_edges):
            continue
        if all(_induced_connected(adj, p) for p in parts):
            return True
    return False


def complete_graph(k: int, label: str = BLANK) -> LabeledGraph:
    edges = [(u, v) for u in range(k) for v in range(k) if u != v]
    return LabeledGraph.build([label] * k, edges, sigma=[label])


def mirror(g: LabeledGraph, u: Iterable[int]) -> tuple[LabeledGraph, dict[int, int]]:
    """Mirror the node set ``u``.

    Returns the new graph and the bijection from ``u`` to the mirror nodes,
    which are appended after the original nodes in increasing order of ``u``.
    """
    us = sorted(set(u))
    for x in us:
        if not 0 <= x < g.n:
            raise InvalidInputError(f"node {x} is not in the graph")
    f = {x: g.n + k for k, x in enumerate(us)}
    uset = set(us)
    labels = g.labels + tuple(g.labels[x] for x in us)
    edges = []
    for es in g.edges:
        new = set(es)
        for (a, b) in es:
            if a not in uset and b in uset:
                new.add((a, f[b]))
            if a in uset and b not in uset:
                new.add((f[a], b))
            if a in uset and b in uset:
                new.add((f[a], f[b]))
        edges.append(frozenset(new))
    return LabeledGraph(g.sigma, g.gamma, labels, tuple(edges)), f


def _merge(g: LabeledGraph, w: int, w2: int, symmetric: bool) -> LabeledGraph:
    if w == w2:
        raise InvalidInputError("merging needs two distinct nodes")
    for x in (w, w2):
        if not 0 <= x < g.n:
            raise InvalidInputError(f"node {x} is not in the graph")
    survivors = [v for v in g.nodes if v != w2]
    renum = {v: i for i, v in enumerate(survivors)}
    edges = []
    for es in g.edges:
        new = set()
        for (a, b) in es:
            if a != w2 and b != w2:
                new.add((renum[a], renum[b]))
            if a == w2 and b != w2:
                new.add((renum[w], renum[b]))
            if symmetric and b == w2 and a != w2:
                new.add((renum[a], renum[w]))
        edges.append(frozenset(new))
    labels = tuple(g.labels[v] for v in survivors)
    return LabeledGraph(g.sigma, g.gamma, labels, tuple(edges))


def merge_asym(g: LabeledGraph, w: int, w2: int) -> LabeledGraph:
    """Remove ``w2`` and redirect its outgoing edges so they leave ``w``."""
    return _merge(g, w, w2, symmetric=False)


def merge_sym(g: LabeledGraph, w: int, w2: int) -> LabeledGraph:
    """Remove ``w2`` and redirect both its outgoing and incoming edges to ``w``."""
    return _merge(g, w, w2, symmetric=True)


def edgeless_graph(n: int, label: str = BLANK) -> LabeledGraph:
    return LabeledGraph.build([label] * n, [], sigma=[label])


def graph_to_json(g: LabeledGraph) -> dict:
    return {
        "sigma": list(g.sigma.symbols),
        "gamma": list(g.gamma.symbols),
        "nodes": [{"label": lab} for lab in g.labels],
        "edges": {sym: [list(e) for e in sorted(es)] for sym, es in zip(g.gamma.symbols, g.edges)},
    }


def graph_from_json(data: Mapping | str) -> LabeledGraph:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"graph is not valid JSON: {exc}") from exc
    try:
        labels = [node["label"] for node in data["nodes"]]
        sigma = data.get("sigma") or sorted(set(labels))
        gamma = data.get("gamma") or sorted(data.get("edges", {})) or [BLANK]
        edges = {k: [tuple(e) for e in v] for k, v in data.get("edges", {}).items()}
        for k, pairs in edges.items():
            for e in pairs:
                if len(e) != 2:
                    raise InvalidInputError(f"edge {list(e)} under {k!r} is not a pair")
        return LabeledGraph.build(labels, edges, sigma=sigma, gamma=gamma)
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed graph document: {exc}") from exc
