"""Brute-force model checking and the encoding of assignments into node labels."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..errors import InvalidInputError
from ..graphs import Alphabet, LabeledGraph
from . import syntax as sx


@dataclass(frozen=True)
class Assignment:
    """Values of node variables (node indices) and set variables (node sets)."""

    nodes: Mapping[str, int] = field(default_factory=dict)
    sets: Mapping[str, frozenset] = field(default_factory=dict)

    @classmethod
    def of(cls, mapping: Mapping[str, object] | None = None) -> "Assignment":
        """Split a single mapping by variable case."""
        if isinstance(mapping, Assignment):
            return mapping
        nodes, sets = {}, {}
        for k, v in (mapping or {}).items():
            sx.check_var(k)
            if sx.is_node_var(k):
                nodes[k] = int(v)
            else:
                sets[k] = frozenset(int(u) for u in v)
        return cls(nodes, sets)

    @property
    def domain(self) -> frozenset:
        return frozenset(self.nodes) | frozenset(self.sets)

    def with_node(self, x: str, v: int) -> "Assignment":
        return Assignment({**self.nodes, x: v}, self.sets)

    def with_set(self, x: str, u: Iterable[int]) -> "Assignment":
        return Assignment(self.nodes, {**self.sets, x: frozenset(u)})

    def inverse(self, n: int, scope: Iterable[str] | None = None) -> list[frozenset]:
        """For each node, the variables of ``scope`` that point at it."""
        keep = self.domain if scope is None else frozenset(scope)
        out = [set() for _ in range(n)]
        for x, v in self.nodes.items():
            if x in keep:
                out[v].add(x)
        for x, us in self.sets.items():
            if x in keep:
                for u in us:
                    out[u].add(x)
        return [frozenset(s) for s in out]


def _check_assignment(alpha: Assignment, n: int) -> None:
    for x, v in alpha.nodes.items():
        if not 0 <= v < n:
            raise InvalidInputError(f"{x} is assigned to node {v}, which does not exist")
    for x, us in alpha.sets.items():
        for u in us:
            if not 0 <= u < n:
                raise InvalidInputError(f"{x} contains node {u}, which does not exist")


# evaluation -------------------------------------------------------------------------------


class _Compiler:
    """Turn a formula into nested closures over a slot list.

    Node variables hold node indices, set variables hold bitmasks.
    """

    def __init__(self, g: LabeledGraph):
        self.g = g
        self.n = g.n
        self.slots = 0
        self.label_masks = {a: 0 for a in g.sigma}
        for v, a in enumerate(g.labels):
            self.label_masks[a] |= 1 << v
        self.succ = {}
        for gi, gamma in enumerate(g.gamma):
            rows = [0] * g.n
            for u, v in g.edges[gi]:
                rows[u] |= 1 << v
            self.succ[gamma] = tuple(rows)

    def slot(self):
        self.slots += 1
        return self.slots - 1

    def edge_rows(self, gamma):
        if gamma is None:
            if len(self.g.gamma) != 1:
                raise InvalidInputError("an edge atom without symbol needs a single edge symbol")
            gamma = self.g.gamma.symbols[0]
        if gamma not in self.succ:
            raise InvalidInputError(f"edge symbol {gamma!r} is not in the edge alphabet")
        return self.succ[gamma]

    def build(self, f: sx.Formula, scope: Mapping[str, int]):
        if isinstance(f, sx.Const):
            val = f.value
            return lambda env: val
        if isinstance(f, sx.Lab):
            if f.label not in self.label_masks:
                raise InvalidInputError(f"label {f.label!r} is not in the node alphabet")
            mask, s = self.label_masks[f.label], scope[f.var]
            return lambda env: (mask >> env[s]) & 1 == 1
        if isinstance(f, sx.Edge):
            rows, a, b = self.edge_rows(f.gamma), scope[f.src], scope[f.dst]
            return lambda env: (rows[env[a]] >> env[b]) & 1 == 1
        if isinstance(f, sx.Eq):
            a, b = scope[f.left], scope[f.right]
            return lambda env: env[a] == env[b]
        if isinstance(f, sx.In):
            a, b = scope[f.var], scope[f.setvar]
            return lambda env: (env[b] >> env[a]) & 1 == 1
        if isinstance(f, sx.Not):
            inner = self.build(f.arg, scope)
            return lambda env: not inner(env)
        if isinstance(f, sx.And):
            fns = tuple(self.build(c, scope) for c in f.args)
            if len(fns) == 2:
                p, q = fns
                return lambda env: p(env) and q(env)

            def conj(env):
                for fn in fns:
                    if not fn(env):
                        return False
                return True
            return conj
        if isinstance(f, sx.Or):
            fns = tuple(self.build(c, scope) for c in f.args)
            if len(fns) == 2:
                p, q = fns
                return lambda env: p(env) or q(env)

            def disj(env):
                for fn in fns:
                    if fn(env):
                        return True
                return False
            return disj
        if isinstance(f, sx.Implies):
            p, q = self.build(f.left, scope), self.build(f.right, scope)
            return lambda env: (not p(env)) or q(env)
        if isinstance(f, sx.Iff):
            p, q = self.build(f.left, scope), self.build(f.right, scope)
            return lambda env: p(env) == q(env)
        if isinstance(f, sx.QUANTIFIERS):
            s = self.slot()
            body = self.build(f.body, {**scope, f.var: s})
            values = range(self.n) if isinstance(f, (sx.ExistsNode, sx.ForallNode)) else range(1 << self.n)
            if isinstance(f, (sx.ExistsNode, sx.ExistsSet)):
                def ex(env):
                    for v in values:
                        env[s] = v
                        if body(env):
                            return True
                    return False
                return ex

            def fa(env):
                for v in values:
                    env[s] = v
                    if not body(env):
                        return False
                return True
            return fa
        raise InvalidInputError(f"not a formula: {f!r}")


def compile_on(f: sx.Formula, g: LabeledGraph, free: Iterable[str] = ()):
    """Closure ``fn(values)`` evaluating ``f`` on ``g``.

    ``values`` lists the free variables in the order given by ``free``: node
    indices for node variables, bitmasks for set variables.
    """
    c = _Compiler(g)
    free = list(free)
    scope = {x: c.slot() for x in free}
    body = c.build(f, scope)
    width = c.slots
    k = len(free)

    def run(values):
        env = list(values) + [0] * (width - k)
        return bool(body(env))
    return run


def evaluate(f: sx.Formula, g: LabeledGraph, alpha: Assignment | Mapping | None = None) -> bool:
    """Truth of ``f`` in ``g`` under ``alpha``, by exhaustive quantification."""
    alpha = Assignment.of(alpha)
    missing = sx.free_vars(f) - alpha.domain
    if missing:
        raise InvalidInputError(f"free variables without a value: {sorted(missing)}")
    _check_assignment(alpha, g.n)
    free = sorted(sx.free_vars(f))
    values = []
    for x in free:
        if x in alpha.nodes:
            values.append(alpha.nodes[x])
        else:
            values.append(sum(1 << u for u in alpha.sets[x]))
    return compile_on(f, g, free)(values)


# encoding ---------------------------------------------------------------------------------


def pair_label(a: str, variables: Iterable[str]) -> str:
    """``a`` itself for the empty set, otherwise ``a|{x,X}`` with sorted variables."""
    vs = sorted(variables)
    return a if not vs else f"{a}|{{{','.join(vs)}}}"


def split_label(label: str) -> tuple[str, frozenset]:
    if label.endswith("}") and "|{" in label:
        a, _, rest = label.rpartition("|{")
        vs = frozenset(rest[:-1].split(","))
        if a and all(vs):
            return a, vs
    return label, frozenset()


def pair_alphabet(sigma: Iterable[str], variables: Iterable[str]) -> Alphabet:
    vs = sorted(set(variables))
    subsets = itertools.chain.from_iterable(itertools.combinations(vs, k) for k in range(len(vs) + 1))
    subsets = list(subsets)
    return Alphabet.of([pair_label(a, m) for a in sigma for m in subsets])


def encode_assignment(g: LabeledGraph, alpha: Assignment | Mapping,
                      scope: Iterable[str] | None = None) -> LabeledGraph:
    """The graph whose label at ``v`` is ``<label, variables pointing at v>``."""
    alpha = Assignment.of(alpha)
    scope = alpha.domain if scope is None else frozenset(scope)
    if alpha.domain != scope:
        raise InvalidInputError(f"assignment covers {sorted(alpha.domain)}, scope is {sorted(scope)}")
    _check_assignment(alpha, g.n)
    for x in scope:
        sx.check_var(x)
    inv = alpha.inverse(g.n, scope)
    labels = [pair_label(a, m) for a, m in zip(g.labels, inv)]
    return LabeledGraph(pair_alphabet(g.sigma, scope), g.gamma, tuple(labels), g.edges)


def decode_assignment(ge: LabeledGraph) -> tuple[LabeledGraph, Assignment]:
    """Inverse of :func:`encode_assignment`; node variables must occur exactly once."""
    parts = [split_label(a) for a in ge.sigma]
    base = sorted({a for a, _ in parts})
    scope = set().union(*(m for _, m in parts))
    nodes, sets = {}, {x: set() for x in scope if sx.is_set_var(x)}
    labels = []
    for v, lab in enumerate(ge.labels):
        a, m = split_label(lab)
        labels.append(a)
        for x in m:
            if sx.is_node_var(x):
                if x in nodes:
                    raise InvalidInputError(f"node variable {x} labels several nodes")
                nodes[x] = v
            else:
                sets[x].add(v)
    unset = [x for x in scope if sx.is_node_var(x) and x not in nodes]
    if unset:
        raise InvalidInputError(f"node variables {sorted(unset)} label no node")
    g = LabeledGraph(Alphabet.of(base), ge.gamma, tuple(labels), ge.edges)
    return g, Assignment(nodes, {x: frozenset(u) for x, u in sets.items()})
